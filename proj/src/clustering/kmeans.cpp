#include <algorithm>
#include <cmath>

#include "rnkm/clustering.hpp"
#include "rnkm/error.hpp"

namespace rnkm::cluster {

ClusteringResult lloyd_kmeans(const Matrix& x, std::size_t k, const Matrix& init, const IterationOptions& options) {
  if (k < 1 || k > x.rows()) throw_invalid("k-means needs 1 <= k <= n");
  if (init.rows() != k || init.cols() != x.cols()) throw_invalid("initial centroids have the wrong shape");
  if (options.max_iters < 1) throw_invalid("max_iters must be >= 1");

  const auto assign = [&](const Matrix& c) { return nearest_centroid(x, c); };
  ClusteringResult result;
  Matrix centroids = init;
  std::vector<int> labels;
  for (int it = 1; it <= options.max_iters; ++it) {
    labels = assign(centroids);
    repair_empty_clusters(x, labels, centroids, assign);
    Matrix next = cluster_means(x, labels, centroids);

    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) shift = std::max(shift, distance(next.row(c), centroids.row(c)));
    centroids = std::move(next);
    result.objective_trace.push_back(wcss(x, labels, centroids));
    result.iterations = it;
    if (shift < options.tol) {
      result.converged = true;
      break;
    }
  }
  result.centroids = std::move(centroids);
  result.partition = Partition::from_labels(std::move(labels), static_cast<int>(k));
  return result;
}

}  // namespace rnkm::cluster
