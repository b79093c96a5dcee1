#include "rnkm/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "rnkm/error.hpp"

namespace rnkm::validate {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_shape(const Matrix& x, const cluster::Partition& p) {
  if (p.labels.size() != x.rows())
    throw_invalid("partition has " + std::to_string(p.labels.size()) + " labels for " + std::to_string(x.rows()) +
                  " points");
  if (!p.is_valid()) throw_invalid("partition has empty clusters or out-of-range labels");
}

std::int64_t choose2(std::int64_t m) { return m * (m - 1) / 2; }

std::vector<int> compact(std::span<const int> labels) {
  std::map<int, int> ids;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = ids.emplace(labels[i], static_cast<int>(ids.size()));
    out[i] = it->second;
  }
  return out;
}

}  // namespace

double silhouette(const Matrix& x, const cluster::Partition& partition) {
  check_shape(x, partition);
  const std::size_t n = x.rows();
  const auto k = static_cast<std::size_t>(partition.k);
  if (k < 2 || k >= n) throw_invalid("silhouette needs 2 <= k <= n-1");

  const auto counts = partition.counts();
  std::vector<double> sums(k);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      sums[static_cast<std::size_t>(partition.labels[j])] += distance(x.row(i), x.row(j));
    }
    const auto own = static_cast<std::size_t>(partition.labels[i]);
    if (counts[own] == 1) continue;  // s(i) = 0
    const double a = sums[own] / static_cast<double>(counts[own] - 1);
    double b = kInf;
    for (std::size_t c = 0; c < k; ++c)
      if (c != own) b = std::min(b, sums[c] / static_cast<double>(counts[c]));
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

namespace {

Matrix means_of(const Matrix& x, const cluster::Partition& p) {
  return cluster::cluster_means(x, p.labels, Matrix(static_cast<std::size_t>(p.k), x.cols()));
}

}  // namespace

double davies_bouldin(const Matrix& x, const cluster::Partition& partition) {
  check_shape(x, partition);
  const auto k = static_cast<std::size_t>(partition.k);
  if (k < 2) throw_invalid("Davies-Bouldin needs k >= 2");

  const Matrix centers = means_of(x, partition);
  const auto counts = partition.counts();
  std::vector<double> spread(k, 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto c = static_cast<std::size_t>(partition.labels[i]);
    spread[c] += distance(x.row(i), centers.row(c));
  }
  for (std::size_t c = 0; c < k; ++c) spread[c] /= static_cast<double>(counts[c]);

  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double sep = distance(centers.row(i), centers.row(j));
      const double ratio = sep > 0.0 ? (spread[i] + spread[j]) / sep : kInf;
      worst = std::max(worst, ratio);
    }
    total += worst;
  }
  return total / static_cast<double>(k);
}

double calinski_harabasz(const Matrix& x, const cluster::Partition& partition) {
  check_shape(x, partition);
  const std::size_t n = x.rows();
  const auto k = static_cast<std::size_t>(partition.k);
  if (k < 2 || k >= n) throw_invalid("Calinski-Harabasz needs 2 <= k <= n-1");

  const Matrix centers = means_of(x, partition);
  const auto counts = partition.counts();
  std::vector<double> grand(x.cols(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < x.cols(); ++c) grand[c] += x(i, c);
  for (double& v : grand) v /= static_cast<double>(n);

  double ssw = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    ssw += squared_distance(x.row(i), centers.row(static_cast<std::size_t>(partition.labels[i])));
  double ssb = 0.0;
  for (std::size_t c = 0; c < k; ++c) ssb += static_cast<double>(counts[c]) * squared_distance(centers.row(c), grand);

  if (ssw == 0.0) return kInf;
  return (ssb / static_cast<double>(k - 1)) / (ssw / static_cast<double>(n - k));
}

double distortion(const Matrix& x, const cluster::Partition& partition, const Matrix& centroids) {
  if (partition.labels.size() != x.rows()) throw_invalid("partition length does not match the data");
  if (centroids.rows() != static_cast<std::size_t>(partition.k) || centroids.cols() != x.cols())
    throw_invalid("centroid matrix shape does not match k x d");
  return cluster::wcss(x, partition.labels, centroids);
}

PairCounts pair_counts(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size())
    throw_invalid("labelings differ in length (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  if (a.size() < 2) throw_invalid("pair counting needs at least two points");

  const auto ca = compact(a);
  const auto cb = compact(b);
  const auto ra = static_cast<std::size_t>(*std::max_element(ca.begin(), ca.end()) + 1);
  const auto rb = static_cast<std::size_t>(*std::max_element(cb.begin(), cb.end()) + 1);

  std::vector<std::int64_t> table(ra * rb, 0), rows(ra, 0), cols(rb, 0);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    ++table[static_cast<std::size_t>(ca[i]) * rb + static_cast<std::size_t>(cb[i])];
    ++rows[static_cast<std::size_t>(ca[i])];
    ++cols[static_cast<std::size_t>(cb[i])];
  }

  PairCounts pc;
  for (auto m : table) pc.same_same += choose2(m);
  std::int64_t row_pairs = 0, col_pairs = 0;
  for (auto m : rows) row_pairs += choose2(m);
  for (auto m : cols) col_pairs += choose2(m);
  pc.same_diff = row_pairs - pc.same_same;
  pc.diff_same = col_pairs - pc.same_same;
  pc.diff_diff = choose2(static_cast<std::int64_t>(a.size())) - pc.same_same - pc.same_diff - pc.diff_same;
  return pc;
}

double rand_index(std::span<const int> a, std::span<const int> b) {
  const auto pc = pair_counts(a, b);
  return static_cast<double>(pc.same_same + pc.diff_diff) / static_cast<double>(pc.total());
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  const auto pc = pair_counts(a, b);
  // Cleared of the expected-index fraction and evaluated in exact integer
  // arithmetic, so small hand cases come out exact.
  __extension__ using wide = __int128;
  const wide index = pc.same_same;
  const wide rows = pc.same_same + pc.same_diff;
  const wide cols = pc.same_same + pc.diff_same;
  const wide total = pc.total();
  const wide num = 2 * (index * total - rows * cols);
  const wide den = (rows + cols) * total - 2 * rows * cols;
  if (den == 0) return 1.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

bool ValidationReport::davies_bouldin_infinite() const { return std::isinf(davies_bouldin); }
bool ValidationReport::calinski_harabasz_infinite() const { return std::isinf(calinski_harabasz); }

bool ValidationReport::in_range() const {
  const bool si = silhouette >= -1.0 && silhouette <= 1.0;
  const bool db = davies_bouldin >= 0.0;
  const bool ch = calinski_harabasz >= 0.0;
  const bool di = distortion >= 0.0 && std::isfinite(distortion);
  const bool ar = !ari || (*ari >= -1.0 && *ari <= 1.0);
  return si && db && ch && di && ar;
}

ValidationReport evaluate(const Matrix& x, const cluster::Partition& partition, const Matrix& centroids,
                          std::optional<std::span<const int>> truth) {
  ValidationReport r;
  r.silhouette = silhouette(x, partition);
  r.davies_bouldin = davies_bouldin(x, partition);
  r.calinski_harabasz = calinski_harabasz(x, partition);
  r.distortion = distortion(x, partition, centroids);
  if (truth) r.ari = adjusted_rand_index(*truth, partition.labels);
  return r;
}

}  // namespace rnkm::validate
