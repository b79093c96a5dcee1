#include <algorithm>
#include <cmath>
#include <numeric>

#include "rnkm/clustering.hpp"
#include "rnkm/error.hpp"
#include "rnkm/pmspace.hpp"
#include "rnkm/random.hpp"

namespace rnkm::cluster {

std::vector<std::size_t> Partition::counts() const {
  std::vector<std::size_t> c(static_cast<std::size_t>(std::max(k, 0)), 0);
  for (int l : labels)
    if (l >= 0 && l < k) ++c[static_cast<std::size_t>(l)];
  return c;
}

bool Partition::is_valid() const {
  if (k < 1) return false;
  for (int l : labels)
    if (l < 0 || l >= k) return false;
  const auto c = counts();
  return std::all_of(c.begin(), c.end(), [](std::size_t v) { return v > 0; });
}

Partition Partition::from_labels(std::vector<int> labels, int k) {
  Partition p{std::move(labels), k};
  if (k < 1) throw_invalid("partition needs k >= 1");
  for (std::size_t i = 0; i < p.labels.size(); ++i) {
    if (p.labels[i] < 0 || p.labels[i] >= k)
      throw_invalid("label " + std::to_string(p.labels[i]) + " at row " + std::to_string(i) +
                    " outside [0," + std::to_string(k) + ")");
  }
  const auto c = p.counts();
  for (std::size_t j = 0; j < c.size(); ++j)
    if (c[j] == 0) throw_invalid("cluster " + std::to_string(j) + " is empty");
  return p;
}

double objective_rnkm(const Matrix& x, std::span<const int> labels, const Matrix& centroids, double t) {
  if (!(t > 0.0)) throw_domain("objective requires t > 0");
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    total += pm::gamma_ddf(distance(x.row(i), centroids.row(static_cast<std::size_t>(labels[i]))), t);
  return total;
}

double average_within_cluster_gamma(const Matrix& points, double t) {
  if (!(t > 0.0)) throw_domain("average within-cluster Gamma requires t > 0");
  const std::size_t r = points.rows();
  if (r < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j) sum += pm::gamma_ddf(distance(points.row(i), points.row(j)), t);
  return sum / static_cast<double>(r);
}

double objective_pairwise(const Matrix& x, const Partition& partition, double t) {
  double total = 0.0;
  for (int c = 0; c < partition.k; ++c) {
    std::vector<double> rows;
    std::size_t count = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (partition.labels[i] != c) continue;
      rows.insert(rows.end(), x.row(i).begin(), x.row(i).end());
      ++count;
    }
    total += average_within_cluster_gamma(Matrix(count, x.cols(), std::move(rows)), t);
  }
  return total;
}

double wcss(const Matrix& x, std::span<const int> labels, const Matrix& centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    total += squared_distance(x.row(i), centroids.row(static_cast<std::size_t>(labels[i])));
  return total;
}

std::vector<int> rnkm_assign(const Matrix& x, const Matrix& centroids, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw_domain("rnkm_assign requires t > 0");
  if (centroids.rows() == 0) throw_invalid("rnkm_assign needs at least one centroid");
  if (centroids.cols() != x.cols()) throw_invalid("centroid dimension does not match data");

  std::vector<int> labels(x.rows(), 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    int best = 0;
    double best_d2 = squared_distance(x.row(i), centroids.row(0));
    double best_gamma = pm::gamma_ddf(std::sqrt(best_d2), t);
    for (std::size_t j = 1; j < centroids.rows(); ++j) {
      const double d2 = squared_distance(x.row(i), centroids.row(j));
      const double g = pm::gamma_ddf(std::sqrt(d2), t);
      if (g > best_gamma || (g == best_gamma && d2 < best_d2)) {
        best = static_cast<int>(j);
        best_gamma = g;
        best_d2 = d2;
      }
    }
    labels[i] = best;
  }
  return labels;
}

std::vector<int> nearest_centroid(const Matrix& x, const Matrix& centroids) {
  if (centroids.rows() == 0) throw_invalid("nearest_centroid needs at least one centroid");
  if (centroids.cols() != x.cols()) throw_invalid("centroid dimension does not match data");
  std::vector<int> labels(x.rows(), 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double best = squared_distance(x.row(i), centroids.row(0));
    for (std::size_t j = 1; j < centroids.rows(); ++j) {
      const double d2 = squared_distance(x.row(i), centroids.row(j));
      if (d2 < best) {
        best = d2;
        labels[i] = static_cast<int>(j);
      }
    }
  }
  return labels;
}

Matrix cluster_means(const Matrix& x, std::span<const int> labels, const Matrix& fallback) {
  const std::size_t k = fallback.rows();
  const std::size_t d = x.cols();
  Matrix sums(k, d);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    ++counts[c];
    auto row = sums.row(c);
    for (std::size_t j = 0; j < d; ++j) row[j] += x(i, j);
  }
  for (std::size_t c = 0; c < k; ++c) {
    auto row = sums.row(c);
    if (counts[c] == 0) {
      std::copy(fallback.row(c).begin(), fallback.row(c).end(), row.begin());
      continue;
    }
    for (double& v : row) v /= static_cast<double>(counts[c]);
  }
  return sums;
}

bool repair_empty_clusters(const Matrix& x, std::vector<int>& labels, Matrix& centroids,
                           const std::function<std::vector<int>(const Matrix&)>& assign) {
  const std::size_t k = centroids.rows();
  auto count = [&] {
    std::vector<std::size_t> c(k, 0);
    for (int l : labels) ++c[static_cast<std::size_t>(l)];
    return c;
  };

  std::vector<std::size_t> counts = count();
  if (std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; })) return false;

  // Moves the member of the largest cluster farthest from its centroid into
  // `empty` and puts that cluster's centroid on it.
  auto split_largest = [&](std::size_t empty) {
    const auto largest =
        static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    if (counts[largest] < 2) throw Error(ErrorCode::Numeric, "empty-cluster repair failed: no cluster to split");
    std::size_t far = x.rows();
    double far_d2 = -1.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (labels[i] != static_cast<int>(largest)) continue;
      const double d2 = squared_distance(x.row(i), centroids.row(largest));
      if (d2 > far_d2) {
        far_d2 = d2;
        far = i;
      }
    }
    std::copy(x.row(far).begin(), x.row(far).end(), centroids.row(empty).begin());
    labels[far] = static_cast<int>(empty);
    --counts[largest];
    ++counts[empty];
    return far;
  };

  std::vector<std::pair<std::size_t, std::size_t>> seeds;  // (cluster, point)
  for (std::size_t empty = 0; empty < k; ++empty)
    if (counts[empty] == 0) seeds.emplace_back(empty, split_largest(empty));

  labels = assign(centroids);
  counts = count();
  for (const auto& [cluster, point] : seeds) {
    if (counts[cluster] > 0) continue;
    // Coincident centroids: the seed point is equidistant, hand it over
    // unless that would empty its current cluster.
    const auto from = static_cast<std::size_t>(labels[point]);
    if (counts[from] < 2) continue;
    --counts[from];
    labels[point] = static_cast<int>(cluster);
    ++counts[cluster];
  }
  // The reassignment can also drain a cluster that was never empty, when a
  // new seed captures all of its members.
  for (std::size_t empty = 0; empty < k; ++empty)
    if (counts[empty] == 0) split_largest(empty);
  return true;
}

Matrix kmeanspp_init(const Matrix& x, std::size_t k, std::uint64_t seed) {
  const std::size_t n = x.rows();
  if (k < 1 || k > n) throw_invalid("k-means++ needs 1 <= k <= n");
  Rng rng(seed);
  Matrix centers(k, x.cols());
  std::vector<bool> chosen(n, false);

  std::size_t first = rng.uniform_index(n);
  chosen[first] = true;
  std::copy(x.row(first).begin(), x.row(first).end(), centers.row(0).begin());

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(x.row(i), centers.row(0));

  for (std::size_t c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = n;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cum += d2[i];
        if (cum > r) {
          pick = i;
          break;
        }
      }
      if (pick == n) {  // rounding at the top end
        for (std::size_t i = n; i-- > 0;)
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
      }
    } else {
      std::vector<std::size_t> remaining;
      for (std::size_t i = 0; i < n; ++i)
        if (!chosen[i]) remaining.push_back(i);
      pick = remaining[rng.uniform_index(remaining.size())];
    }
    chosen[pick] = true;
    std::copy(x.row(pick).begin(), x.row(pick).end(), centers.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(x.row(i), centers.row(c)));
  }
  return centers;
}

Matrix random_init(const Matrix& x, std::size_t k, std::uint64_t seed) {
  const std::size_t n = x.rows();
  if (k < 1 || k > n) throw_invalid("random init needs 1 <= k <= n");
  Rng rng(seed);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(n - i);
    std::swap(idx[i], idx[j]);
  }
  Matrix centers(k, x.cols());
  for (std::size_t i = 0; i < k; ++i) std::copy(x.row(idx[i]).begin(), x.row(idx[i]).end(), centers.row(i).begin());
  return centers;
}

double median_pairwise_distance(const Matrix& x) {
  std::vector<double> d;
  d.reserve(x.rows() * (x.rows() - 1) / 2);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = i + 1; j < x.rows(); ++j) d.push_back(distance(x.row(i), x.row(j)));
  if (d.empty()) return 0.0;
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  double m = d[mid];
  if (d.size() % 2 == 0) {
    const double lower = *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lower);
  }
  return m;
}

Partition harden(const Matrix& membership) {
  const std::size_t n = membership.rows();
  const std::size_t k = membership.cols();
  if (k > n) throw_invalid("cannot harden: more clusters than points");
  std::vector<int> labels(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = membership.row(i);
    labels[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  std::vector<std::size_t> counts(k, 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] > 0) continue;
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (counts[static_cast<std::size_t>(labels[i])] < 2) continue;
      if (best == n || membership(i, c) > membership(best, c)) best = i;
    }
    --counts[static_cast<std::size_t>(labels[best])];
    labels[best] = static_cast<int>(c);
    ++counts[c];
  }
  return Partition::from_labels(std::move(labels), static_cast<int>(k));
}

std::vector<double> t_grid(double lo, double hi, std::size_t steps, bool log_spaced) {
  if (steps == 0) throw_invalid("t grid needs at least one step");
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) throw_domain("t grid needs 0 < lo <= hi");
  std::vector<double> out(steps);
  if (steps == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < steps; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(steps - 1);
    // Base-10 exponents keep decade points such as 1 and 10 exact.
    out[i] = log_spaced ? std::pow(10.0, std::log10(lo) + f * (std::log10(hi) - std::log10(lo))) : lo + f * (hi - lo);
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace rnkm::cluster
