#include <algorithm>
#include <cmath>
#include <sstream>

#include "rnkm/clustering.hpp"
#include "rnkm/error.hpp"
#include "rnkm/pmspace.hpp"
#include "rnkm/validation.hpp"

namespace rnkm::cluster {
namespace {

void check_k(const Matrix& x, std::size_t k) {
  if (k < 2) throw_invalid("k must be at least 2");
  if (k > x.rows())
    throw_invalid("k=" + std::to_string(k) + " exceeds the number of points n=" + std::to_string(x.rows()));
}

double gamma_mass(const Matrix& x, std::span<const std::size_t> members, std::span<const double> c, double t) {
  double g = 0.0;
  for (std::size_t i : members) g += pm::gamma_ddf(distance(x.row(i), c), t);
  return g;
}

}  // namespace

RnkmStepper::RnkmStepper(const Matrix& x, Matrix init, double t) : x_(x), centroids_(std::move(init)), t_(t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw_domain("RNKM requires t > 0");
  if (centroids_.cols() != x.cols()) throw_invalid("initial centroids have the wrong dimension");
  if (centroids_.rows() > x.rows()) throw_invalid("more centroids than points");
  labels_ = rnkm_assign(x_, centroids_, t_);
  objective_ = objective_rnkm(x_, labels_, centroids_, t_);
}

double RnkmStepper::step(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw_domain("RNKM requires t > 0");
  t_ = t;
  const std::size_t k = centroids_.rows();
  const std::size_t d = x_.cols();

  labels_ = rnkm_assign(x_, centroids_, t);
  repair_empty_clusters(x_, labels_, centroids_, [&](const Matrix& c) { return rnkm_assign(x_, c, t); });

  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < labels_.size(); ++i) members[static_cast<std::size_t>(labels_[i])].push_back(i);

  Matrix next = centroids_;
  std::vector<double> candidate(d);
  for (std::size_t c = 0; c < k; ++c) {
    const auto& idx = members[c];
    if (idx.empty()) continue;
    const auto old = centroids_.row(c);
    const double g_old = gamma_mass(x_, idx, old, t);

    std::fill(candidate.begin(), candidate.end(), 0.0);
    for (std::size_t i : idx)
      for (std::size_t j = 0; j < d; ++j) candidate[j] += x_(i, j);
    for (double& v : candidate) v /= static_cast<double>(idx.size());
    if (gamma_mass(x_, idx, candidate, t) >= g_old) {
      std::copy(candidate.begin(), candidate.end(), next.row(c).begin());
      continue;
    }

    // Gamma(sqrt(s)) is convex in s, so its tangent in s minorizes it and
    // the maximizer of the minorizer is this weighted mean.
    std::fill(candidate.begin(), candidate.end(), 0.0);
    double wsum = 0.0;
    for (std::size_t i : idx) {
      const double dist = distance(x_.row(i), old);
      if (dist == 0.0) continue;
      const double w = t / (dist * (t + dist) * (t + dist));
      wsum += w;
      for (std::size_t j = 0; j < d; ++j) candidate[j] += w * x_(i, j);
    }
    if (wsum > 0.0 && std::isfinite(wsum)) {
      for (double& v : candidate) v /= wsum;
      if (gamma_mass(x_, idx, candidate, t) > g_old) std::copy(candidate.begin(), candidate.end(), next.row(c).begin());
    }
  }

  double shift = 0.0;
  for (std::size_t c = 0; c < k; ++c) shift = std::max(shift, distance(next.row(c), centroids_.row(c)));
  centroids_ = std::move(next);
  objective_ = objective_rnkm(x_, labels_, centroids_, t);
  return shift;
}

ClusteringResult rnkm_single_t(const Matrix& x, std::size_t k, double t, const Matrix& init,
                               const IterationOptions& options, const FrameObserver& observer) {
  check_k(x, k);
  if (init.rows() != k) throw_invalid("initial centroid count does not match k");
  if (options.max_iters < 1) throw_invalid("max_iters must be >= 1");

  RnkmStepper stepper(x, init, t);
  if (observer) observer({0, t, &stepper.centroids(), &stepper.labels(), stepper.objective()});

  ClusteringResult result;
  result.t = t;
  for (int it = 1; it <= options.max_iters; ++it) {
    const double shift = stepper.step();
    result.objective_trace.push_back(stepper.objective());
    result.iterations = it;
    if (observer) observer({it, t, &stepper.centroids(), &stepper.labels(), stepper.objective()});
    if (shift < options.tol) {
      result.converged = true;
      break;
    }
  }
  result.centroids = stepper.centroids();
  result.partition = Partition::from_labels(stepper.labels(), static_cast<int>(k));
  return result;
}

EigenCache::EigenCache(const Matrix& x, std::span<const double> t_values) {
  for (double t : t_values) {
    if (entries_.count(t)) continue;
    const auto w = spectral::pairwise_similarity(x, t);
    entries_.emplace(t, spectral::sym_eigendecomp(spectral::normalized_laplacian(w.weights)));
  }
}

const spectral::EigenPairs* EigenCache::find(double t) const {
  const auto it = entries_.find(t);
  return it == entries_.end() ? nullptr : &it->second;
}

void EigenCache::insert(double t, spectral::EigenPairs pairs) { entries_.insert_or_assign(t, std::move(pairs)); }

Matrix spectral_sampling_init(const Matrix& x, std::size_t k, double t, std::uint64_t seed, const EigenCache* cache) {
  check_k(x, k);
  if (!(t > 0.0)) throw_domain("spectral sampling requires t > 0");

  const spectral::EigenPairs* cached = cache ? cache->find(t) : nullptr;
  spectral::EigenPairs computed;
  if (!cached) {
    const auto w = spectral::pairwise_similarity(x, t);
    computed = spectral::sym_eigendecomp(spectral::normalized_laplacian(w.weights));
    cached = &computed;
  }
  if (cached->vectors.rows() != x.rows()) throw_invalid("cached eigenpairs do not match the data set");
  const auto embedding = spectral::embedding_from_eigenpairs(*cached, k);

  const auto embedded = lloyd_kmeans(embedding.rows, k, kmeanspp_init(embedding.rows, k, seed));
  return cluster_means(x, embedded.partition.labels, Matrix(k, x.cols()));
}

std::string to_string(SelectionScore score) {
  return score == SelectionScore::Silhouette ? "silhouette" : "objective";
}

SelectionScore selection_score_from_string(const std::string& name) {
  if (name == "silhouette") return SelectionScore::Silhouette;
  if (name == "objective") return SelectionScore::Objective;
  throw_invalid("unknown selection score '" + name + "'");
}

RnkmSweepResult rnkm(const Matrix& x, std::size_t k, std::span<const double> t_values,
                     const RnkmSweepOptions& options) {
  if (t_values.empty()) throw_invalid("RNKM sweep needs at least one t value");
  for (double t : t_values)
    if (!(t > 0.0) || !std::isfinite(t)) throw_domain("RNKM sweep t values must be positive");
  check_k(x, k);

  std::vector<double> ts(t_values.begin(), t_values.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  RnkmSweepResult out;
  std::optional<std::size_t> best;
  for (double t : ts) {
    TRun run;
    run.t = t;
    try {
      const Matrix init = spectral_sampling_init(x, k, t, options.seed, options.cache);
      ClusteringResult r = rnkm_single_t(x, k, t, init, options.iteration);
      run.score = options.score == SelectionScore::Silhouette ? validate::silhouette(x, r.partition)
                                                              : r.objective_trace.back();
      run.result = std::move(r);
    } catch (const Error& e) {
      run.error = e.what();
    }
    if (run.score && (!best || *run.score > *out.runs[*best].score)) best = out.runs.size();
    out.runs.push_back(std::move(run));
  }

  if (!best) {
    std::ostringstream msg;
    msg << "every RNKM run failed:";
    for (const auto& r : out.runs) msg << " [t=" << r.t << "] " << r.error << ";";
    throw Error(ErrorCode::Numeric, msg.str());
  }
  out.best = *out.runs[*best].result;
  out.best_score = *out.runs[*best].score;
  return out;
}

}  // namespace rnkm::cluster
