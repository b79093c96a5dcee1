#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rnkm/matrix.hpp"
#include "rnkm/spectral.hpp"

namespace rnkm::cluster {

/// Hard assignment of n points to k clusters. A valid partition has every
/// label in [0, k) used at least once.
struct Partition {
  std::vector<int> labels;
  int k = 0;

  std::size_t size() const noexcept { return labels.size(); }
  std::vector<std::size_t> counts() const;
  bool is_valid() const;

  /// Validates and wraps; throws when a cluster is empty or a label is out of range.
  static Partition from_labels(std::vector<int> labels, int k);
};

struct ClusteringResult {
  Partition partition;
  Matrix centroids;
  std::optional<double> t;
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
};

/// Row-stochastic soft assignment.
struct FuzzyMembership {
  Matrix u;
  double m = 2.0;
};

struct SoftClusteringResult {
  ClusteringResult result;
  FuzzyMembership membership;
};

struct KernelParams {
  double sigma = 1.0;
};

struct IterationOptions {
  int max_iters = 300;
  double tol = 1e-6;  // on the largest centroid displacement
};

/// One iteration's state, handed to observers after the centroid update.
struct Frame {
  int iteration = 0;  // 0 is the initial state
  double t = 0.0;
  const Matrix* centroids = nullptr;
  const std::vector<int>* labels = nullptr;
  double objective = 0.0;
};

using FrameObserver = std::function<void(const Frame&)>;

// ---------------------------------------------------------------------------
// Objectives

/// Sum over clusters of sum over members of t / (t + |c - x|).
double objective_rnkm(const Matrix& x, std::span<const int> labels, const Matrix& centroids, double t);

/// (1/r) * sum_{i<j} Gamma(|x_i - x_j|, t) for r >= 2 points, else 0.
double average_within_cluster_gamma(const Matrix& cluster_points, double t);

/// Pairwise diagnostic J(C): average_within_cluster_gamma summed over clusters.
double objective_pairwise(const Matrix& x, const Partition& partition, double t);

/// Within-cluster sum of squared distances to the given centroids.
double wcss(const Matrix& x, std::span<const int> labels, const Matrix& centroids);

// ---------------------------------------------------------------------------
// Building blocks

/// Label of the centroid maximizing Gamma; ties go to the smaller squared
/// distance and then to the lowest index. Empty clusters are allowed.
std::vector<int> rnkm_assign(const Matrix& x, const Matrix& centroids, double t);

/// Nearest centroid by squared Euclidean distance, lowest index on ties.
std::vector<int> nearest_centroid(const Matrix& x, const Matrix& centroids);

/// Per-cluster means; clusters without members keep their row of `fallback`.
Matrix cluster_means(const Matrix& x, std::span<const int> labels, const Matrix& fallback);

/// Reseeds each empty cluster at the member of the currently largest
/// cluster farthest from that cluster's centroid, then reassigns once with
/// `assign`. A cluster still empty after the reassignment takes its seed
/// point directly, or failing that is reseeded again without reassigning.
/// Returns false when nothing needed repair; throws only when no cluster
/// has two members to give.
bool repair_empty_clusters(const Matrix& x, std::vector<int>& labels, Matrix& centroids,
                           const std::function<std::vector<int>(const Matrix&)>& assign);

/// D^2 seeding. The first centre is a uniform row; later ones are drawn in
/// proportion to squared distance to the nearest chosen centre. When every
/// remaining distance is zero the rest are drawn uniformly without replacement.
Matrix kmeanspp_init(const Matrix& x, std::size_t k, std::uint64_t seed);

/// k distinct rows drawn uniformly (classical random seeding).
Matrix random_init(const Matrix& x, std::size_t k, std::uint64_t seed);

double median_pairwise_distance(const Matrix& x);

// ---------------------------------------------------------------------------
// RNKM

/// Single-t RNKM run, advanced one iteration at a time. Each step assigns
/// by maximal Gamma, repairs empty clusters, and moves every centroid to
/// the cluster mean when that does not lower the cluster's Gamma mass;
/// otherwise it takes a majorize-minimize step (a mean weighted by
/// t / (d (t + d)^2)), accepted only on strict improvement. Both moves
/// keep the objective non-decreasing.
class RnkmStepper {
 public:
  RnkmStepper(const Matrix& x, Matrix init, double t);

  /// Runs one assignment + update at the given t. Returns the largest
  /// centroid displacement.
  double step(double t);
  double step() { return step(t_); }

  const Matrix& centroids() const noexcept { return centroids_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  double objective() const noexcept { return objective_; }
  double t() const noexcept { return t_; }

 private:
  const Matrix& x_;
  Matrix centroids_;
  std::vector<int> labels_;
  double t_;
  double objective_ = 0.0;
};

ClusteringResult rnkm_single_t(const Matrix& x, std::size_t k, double t, const Matrix& init,
                               const IterationOptions& options = {},
                               const FrameObserver& observer = nullptr);

/// Eigendecompositions of the Gamma-Laplacian keyed by t, reusable across
/// seeds and cluster counts for one data set.
class EigenCache {
 public:
  EigenCache() = default;
  EigenCache(const Matrix& x, std::span<const double> t_values);

  const spectral::EigenPairs* find(double t) const;
  void insert(double t, spectral::EigenPairs pairs);

 private:
  std::map<double, spectral::EigenPairs> entries_;
};

/// k-means on the row-normalized spectral embedding of the Gamma(t)
/// similarity graph, mapped back to data-space means of the embedded groups.
Matrix spectral_sampling_init(const Matrix& x, std::size_t k, double t, std::uint64_t seed,
                              const EigenCache* cache = nullptr);

enum class SelectionScore { Silhouette, Objective };

std::string to_string(SelectionScore score);
SelectionScore selection_score_from_string(const std::string& name);

struct TRun {
  double t = 0.0;
  std::optional<double> score;
  std::optional<ClusteringResult> result;
  std::string error;
};

struct RnkmSweepOptions {
  IterationOptions iteration;
  std::uint64_t seed = 0;
  SelectionScore score = SelectionScore::Silhouette;
  const EigenCache* cache = nullptr;
};

struct RnkmSweepResult {
  ClusteringResult best;
  double best_score = 0.0;
  std::vector<TRun> runs;  // ascending t
};

/// Spectral init + single-t RNKM for every t; keeps the highest score,
/// smallest t on ties.
RnkmSweepResult rnkm(const Matrix& x, std::size_t k, std::span<const double> t_values,
                     const RnkmSweepOptions& options = {});

/// n logarithmically (or linearly) spaced values in [lo, hi].
std::vector<double> t_grid(double lo, double hi, std::size_t steps, bool log_spaced = true);

// ---------------------------------------------------------------------------
// Baselines

ClusteringResult lloyd_kmeans(const Matrix& x, std::size_t k, const Matrix& init,
                              const IterationOptions& options = {});

SoftClusteringResult fcm(const Matrix& x, std::size_t k, double m, std::uint64_t seed,
                         const IterationOptions& options = {});

/// Membership row for one point against the centroids (fuzzifier m).
std::vector<double> fcm_membership(std::span<const double> point, const Matrix& centroids, double m);

/// Kernel probabilistic k-means with an RBF kernel, run through the kernel
/// trick. The objective trace holds sum u*d^2 + 2 sigma^2 sum u log u,
/// which the softmax/centroid alternation cannot increase.
SoftClusteringResult kpkm(const Matrix& x, std::size_t k, const KernelParams& params, std::uint64_t seed,
                          const IterationOptions& options = {});

/// Squared feature-space distances |phi(x_i) - c_j|^2 for centroids that are
/// membership-weighted means in feature space.
Matrix kernel_feature_distances(const Matrix& kernel, const Matrix& membership);

Matrix rbf_kernel(const Matrix& x, double sigma);

// ---------------------------------------------------------------------------
// Model selection

enum class ElbowRunner { Lloyd, Rnkm };

struct ElbowResult {
  int k = 0;
  std::vector<int> ks;
  std::vector<double> curve;  // WCSS, or -J' for RNKM
};

/// Index of the point farthest from the chord joining the first and last
/// curve points; lowest index on ties.
std::size_t knee_index(std::span<const double> xs, std::span<const double> ys);

ElbowResult elbow_select_k(const Matrix& x, int k_min, int k_max, ElbowRunner runner, std::uint64_t seed,
                           double t = 1.0, const IterationOptions& options = {});

/// Makes a hard partition from row-argmax of a membership matrix, giving
/// any empty cluster its highest-membership point taken from a cluster
/// with more than one member.
Partition harden(const Matrix& membership);

}  // namespace rnkm::cluster
