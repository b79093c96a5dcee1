#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "rnkm/clustering.hpp"
#include "rnkm/matrix.hpp"

namespace rnkm::validate {

/// Mean of s(i) = (b - a) / max(a, b). Points in singleton clusters score 0.
/// Requires 2 <= k <= n - 1.
double silhouette(const Matrix& x, const cluster::Partition& partition);

/// Mean over clusters of max_{j != i} (s_i + s_j) / |c_i - c_j|, with s the
/// mean member-to-centroid distance and c the cluster means. Coincident
/// centroids make the result +infinity.
double davies_bouldin(const Matrix& x, const cluster::Partition& partition);

/// (SSB / (k - 1)) / (SSW / (n - k)); +infinity when SSW == 0.
double calinski_harabasz(const Matrix& x, const cluster::Partition& partition);

/// Sum of squared member-to-centroid distances for the given centroids.
double distortion(const Matrix& x, const cluster::Partition& partition, const Matrix& centroids);

struct PairCounts {
  std::int64_t same_same = 0;  // a: together in both
  std::int64_t same_diff = 0;  // b: together in the first only
  std::int64_t diff_same = 0;  // c: together in the second only
  std::int64_t diff_diff = 0;  // d: apart in both
  std::int64_t total() const noexcept { return same_same + same_diff + diff_same + diff_diff; }
};

/// Pair counts from the contingency table of two labelings. Labels may be
/// any integers; they are compared only for equality.
PairCounts pair_counts(std::span<const int> a, std::span<const int> b);

double rand_index(std::span<const int> a, std::span<const int> b);

/// Hubert-Arabie adjusted Rand index. When the chance-corrected
/// denominator vanishes (both labelings trivial) the result is 1.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

struct ValidationReport {
  double silhouette = 0.0;
  double davies_bouldin = 0.0;
  double calinski_harabasz = 0.0;
  double distortion = 0.0;
  std::optional<double> ari;  // only with ground truth

  bool davies_bouldin_infinite() const;
  bool calinski_harabasz_infinite() const;
  /// True when every present index lies in its documented range.
  bool in_range() const;
};

ValidationReport evaluate(const Matrix& x, const cluster::Partition& partition, const Matrix& centroids,
                          std::optional<std::span<const int>> truth = std::nullopt);

}  // namespace rnkm::validate
