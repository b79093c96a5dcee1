#include <algorithm>
#include <cmath>

#include "rnkm/clustering.hpp"
#include "rnkm/error.hpp"

namespace rnkm::cluster {

std::size_t knee_index(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || xs.size() != ys.size()) throw_invalid("knee detection needs matching, non-empty curves");
  const std::size_t last = xs.size() - 1;
  if (last < 2) return 0;

  const double dx = xs[last] - xs[0];
  const double dy = ys[last] - ys[0];
  const double chord = std::hypot(dx, dy);
  if (chord == 0.0) return 0;

  double scale = 0.0;
  for (double y : ys) scale = std::max(scale, std::abs(y));
  // Distances this close to zero count as ties with the chord itself.
  const double tie = 1e-12 * std::max(1.0, scale) * std::abs(dx) / chord;

  std::size_t best = 0;
  double best_d = 0.0;
  for (std::size_t i = 1; i < last; ++i) {
    const double d = std::abs(dx * (ys[0] - ys[i]) - (xs[0] - xs[i]) * dy) / chord;
    if (d > best_d + tie) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

ElbowResult elbow_select_k(const Matrix& x, int k_min, int k_max, ElbowRunner runner, std::uint64_t seed,
                           double t, const IterationOptions& options) {
  if (k_min > k_max) throw_invalid("elbow: empty k range");
  if (k_min < 2 || static_cast<std::size_t>(k_max) > x.rows()) throw_invalid("elbow: k range must lie within [2, n]");

  ElbowResult out;
  for (int k = k_min; k <= k_max; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    double value = 0.0;
    if (runner == ElbowRunner::Lloyd) {
      value = lloyd_kmeans(x, kk, kmeanspp_init(x, kk, seed), options).objective_trace.back();
    } else {
      const auto init = spectral_sampling_init(x, kk, t, seed);
      value = -rnkm_single_t(x, kk, t, init, options).objective_trace.back();
    }
    out.ks.push_back(k);
    out.curve.push_back(value);
  }
  std::vector<double> xs(out.ks.begin(), out.ks.end());
  out.k = out.ks[knee_index(xs, out.curve)];
  return out;
}

}  // namespace rnkm::cluster
