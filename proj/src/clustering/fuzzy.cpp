#include <algorithm>
#include <cmath>
#include <limits>

#include "rnkm/clustering.hpp"
#include "rnkm/error.hpp"

namespace rnkm::cluster {
namespace {

void check_k(const Matrix& x, std::size_t k) {
  if (k < 2 || k > x.rows()) throw_invalid("clustering needs 2 <= k <= n");
}

}  // namespace

std::vector<double> fcm_membership(std::span<const double> point, const Matrix& centroids, double m) {
  if (!(m > 1.0)) throw_domain("FCM fuzzifier m must be > 1");
  const std::size_t k = centroids.rows();
  std::vector<double> u(k, 0.0);
  std::vector<double> d2(k);
  for (std::size_t j = 0; j < k; ++j) {
    d2[j] = squared_distance(point, centroids.row(j));
    if (d2[j] == 0.0) {
      u[j] = 1.0;
      return u;
    }
  }
  // u_j = (sum_l (d_j / d_l)^{2/(m-1)})^{-1}, written with inverse powers.
  const double p = 1.0 / (m - 1.0);
  double sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    u[j] = std::pow(1.0 / d2[j], p);
    sum += u[j];
  }
  if (!std::isfinite(sum)) {
    // Extreme ratios: fall back to the explicit ratio form.
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < k; ++l) s += std::pow(d2[j] / d2[l], p);
      u[j] = 1.0 / s;
    }
    return u;
  }
  for (double& v : u) v /= sum;
  return u;
}

SoftClusteringResult fcm(const Matrix& x, std::size_t k, double m, std::uint64_t seed,
                         const IterationOptions& options) {
  if (!(m > 1.0)) throw_domain("FCM fuzzifier m must be > 1");
  check_k(x, k);
  if (options.max_iters < 1) throw_invalid("max_iters must be >= 1");

  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  Matrix centroids = kmeanspp_init(x, k, seed);
  Matrix u(n, k);

  SoftClusteringResult out;
  auto& result = out.result;
  for (int it = 1; it <= options.max_iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = fcm_membership(x.row(i), centroids, m);
      std::copy(row.begin(), row.end(), u.row(i).begin());
    }

    Matrix next(k, d);
    std::vector<double> weight(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const double w = std::pow(u(i, j), m);
        weight[j] += w;
        for (std::size_t c = 0; c < d; ++c) next(j, c) += w * x(i, c);
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      auto row = next.row(j);
      if (weight[j] > 0.0) {
        for (double& v : row) v /= weight[j];
      } else {
        std::copy(centroids.row(j).begin(), centroids.row(j).end(), row.begin());
      }
    }

    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j) objective += std::pow(u(i, j), m) * squared_distance(x.row(i), next.row(j));

    double shift = 0.0;
    for (std::size_t j = 0; j < k; ++j) shift = std::max(shift, distance(next.row(j), centroids.row(j)));
    centroids = std::move(next);
    result.objective_trace.push_back(objective);
    result.iterations = it;
    if (shift < options.tol) {
      result.converged = true;
      break;
    }
  }

  result.partition = harden(u);
  result.centroids = std::move(centroids);
  out.membership = {std::move(u), m};
  return out;
}

Matrix rbf_kernel(const Matrix& x, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw_domain("RBF bandwidth sigma must be > 0");
  const std::size_t n = x.rows();
  const double denom = 2.0 * sigma * sigma;
  Matrix kernel(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    kernel(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::exp(-squared_distance(x.row(i), x.row(j)) / denom);
      kernel(i, j) = v;
      kernel(j, i) = v;
    }
  }
  return kernel;
}

Matrix kernel_feature_distances(const Matrix& kernel, const Matrix& membership) {
  const std::size_t n = kernel.rows();
  const std::size_t k = membership.cols();
  // a(i, j) = sum_p K(i, p) u(p, j)
  Matrix a(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto krow = kernel.row(i);
    auto arow = a.row(i);
    for (std::size_t p = 0; p < n; ++p) {
      const double kip = krow[p];
      const auto urow = membership.row(p);
      for (std::size_t j = 0; j < k; ++j) arow[j] += kip * urow[j];
    }
  }
  std::vector<double> mass(k, 0.0), self(k, 0.0);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t j = 0; j < k; ++j) {
      mass[j] += membership(p, j);
      self[j] += membership(p, j) * a(p, j);
    }

  Matrix dist(n, k);
  for (std::size_t j = 0; j < k; ++j) {
    if (!(mass[j] > 0.0)) {
      for (std::size_t i = 0; i < n; ++i) dist(i, j) = std::numeric_limits<double>::infinity();
      continue;
    }
    const double s = mass[j];
    for (std::size_t i = 0; i < n; ++i)
      dist(i, j) = std::max(0.0, kernel(i, i) - 2.0 * a(i, j) / s + self[j] / (s * s));
  }
  return dist;
}

namespace {

// Largest feature-space displacement between the centroids implied by two
// membership matrices.
double feature_shift(const Matrix& kernel, const Matrix& u_old, const Matrix& u_new) {
  const std::size_t n = kernel.rows();
  const std::size_t k = u_old.cols();
  double worst = 0.0;
  std::vector<double> diff(n);
  for (std::size_t j = 0; j < k; ++j) {
    double s_old = 0.0, s_new = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s_old += u_old(i, j);
      s_new += u_new(i, j);
    }
    if (!(s_old > 0.0) || !(s_new > 0.0)) {
      if (s_old > 0.0 || s_new > 0.0) worst = std::numeric_limits<double>::infinity();
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) diff[i] = u_new(i, j) / s_new - u_old(i, j) / s_old;
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (diff[i] == 0.0) continue;
      double inner = 0.0;
      const auto krow = kernel.row(i);
      for (std::size_t p = 0; p < n; ++p) inner += krow[p] * diff[p];
      q += diff[i] * inner;
    }
    worst = std::max(worst, std::sqrt(std::max(q, 0.0)));
  }
  return worst;
}

}  // namespace

SoftClusteringResult kpkm(const Matrix& x, std::size_t k, const KernelParams& params, std::uint64_t seed,
                          const IterationOptions& options) {
  if (!(params.sigma > 0.0) || !std::isfinite(params.sigma)) throw_domain("KPKM bandwidth sigma must be > 0");
  check_k(x, k);
  if (options.max_iters < 1) throw_invalid("max_iters must be >= 1");

  const std::size_t n = x.rows();
  const double temperature = 2.0 * params.sigma * params.sigma;
  const Matrix kernel = rbf_kernel(x, params.sigma);

  Matrix u(n, k);
  {
    const auto labels = nearest_centroid(x, kmeanspp_init(x, k, seed));
    for (std::size_t i = 0; i < n; ++i) u(i, static_cast<std::size_t>(labels[i])) = 1.0;
  }

  SoftClusteringResult out;
  auto& result = out.result;
  for (int it = 1; it <= options.max_iters; ++it) {
    const Matrix dist = kernel_feature_distances(kernel, u);
    Matrix next(n, k);
    for (std::size_t i = 0; i < n; ++i) {
      double lo = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) lo = std::min(lo, dist(i, j));
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        next(i, j) = std::isfinite(dist(i, j)) ? std::exp(-(dist(i, j) - lo) / temperature) : 0.0;
        sum += next(i, j);
      }
      for (std::size_t j = 0; j < k; ++j) next(i, j) /= sum;
    }

    const Matrix next_dist = kernel_feature_distances(kernel, next);
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const double w = next(i, j);
        if (w > 0.0) objective += w * next_dist(i, j) + temperature * w * std::log(w);
      }

    const double shift = feature_shift(kernel, u, next);
    u = std::move(next);
    result.objective_trace.push_back(objective);
    result.iterations = it;
    if (shift < options.tol) {
      result.converged = true;
      break;
    }
  }

  // Data-space summary of each cluster: membership-weighted mean.
  Matrix centroids(k, x.cols());
  for (std::size_t j = 0; j < k; ++j) {
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mass += u(i, j);
      for (std::size_t c = 0; c < x.cols(); ++c) centroids(j, c) += u(i, j) * x(i, c);
    }
    if (mass > 0.0)
      for (double& v : centroids.row(j)) v /= mass;
  }

  result.partition = harden(u);
  result.centroids = std::move(centroids);
  out.membership = {std::move(u), 1.0};
  return out;
}

}  // namespace rnkm::cluster
