#pragma once

// Experiment drivers behind the command-line verbs: benchmark tables,
// t-sensitivity sweeps and per-iteration centroid traces.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rnkm/clustering.hpp"
#include "rnkm/data.hpp"
#include "rnkm/validation.hpp"

namespace rnkm::harness {

enum class Algorithm { KM, KMpp, KPKM, FCM, RNKM };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

struct DatasetRef {
  std::string id;
  std::optional<data::ManifestEntry> file;
  std::optional<data::SyntheticSpec> synthetic;
  std::optional<int> k;  // empty selects k with the elbow rule
};

struct BenchConfig {
  std::vector<DatasetRef> datasets;
  std::vector<Algorithm> algorithms;
  std::vector<double> t_grid;
  std::vector<std::uint64_t> seeds;
  cluster::IterationOptions iteration;
  cluster::SelectionScore score = cluster::SelectionScore::Silhouette;
  int elbow_min = 2;
  int elbow_max = 8;
  double fcm_m = 2.0;
  std::optional<double> sigma;  // KPKM bandwidth; median heuristic when empty
  bool normalize = true;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Parses and validates a bench configuration. Relative paths resolve
/// against `base_dir`.
BenchConfig parse_bench_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
BenchConfig load_bench_config(const std::filesystem::path& path);

struct RunRecord {
  std::string dataset;
  Algorithm algorithm = Algorithm::KM;
  std::uint64_t seed = 0;
  int k = 0;
  std::optional<double> t;
  std::optional<validate::ValidationReport> report;
  int iterations = 0;
  bool converged = false;
  double ms = 0.0;
  std::string error;  // empty on success
};

struct BenchOutput {
  std::vector<RunRecord> records;  // sorted by (dataset, algorithm, seed)
  nlohmann::json summary;
};

/// A loaded, optionally normalized data set ready for clustering.
struct PreparedData {
  std::string id;
  data::DataSet data;
  std::vector<bool> constant_columns;
};

PreparedData prepare(const DatasetRef& ref, bool normalize);

BenchOutput run_bench(const BenchConfig& config);

/// Deterministic CSV body: dataset,algo,seed,k,SI,Da,Di,Ca,ARI,t,iters,converged,status
std::string records_csv(const std::vector<RunRecord>& records);
std::string timings_csv(const std::vector<RunRecord>& records);

/// Writes results.csv, timings.csv and summary.json under `out_dir`.
void write_bench(const BenchOutput& output, const std::filesystem::path& out_dir);

/// Median of one index per (dataset, algorithm) over successful seeds.
std::optional<double> median_index(const std::vector<RunRecord>& records, const std::string& dataset,
                                   Algorithm algorithm, const std::string& index);

// ---------------------------------------------------------------------------

struct SweepOptions {
  std::size_t k = 2;
  std::vector<double> t_values;
  std::uint64_t seed = 0;
  cluster::IterationOptions iteration;
};

struct SweepRow {
  double t = 0.0;
  std::optional<validate::ValidationReport> report;
  double objective = 0.0;
  int iterations = 0;
  std::string error;
};

std::vector<SweepRow> sweep_t(const data::DataSet& data, const SweepOptions& options);
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// sweep.csv plus, when `svg` is set, one polyline chart per index.
void write_sweep(const std::vector<SweepRow>& rows, const std::filesystem::path& out_dir, bool svg, bool log_x);

// ---------------------------------------------------------------------------

struct TraceOptions {
  std::size_t k = 2;
  std::vector<double> t_schedule;
  std::uint64_t seed = 0;
  cluster::IterationOptions iteration;
  /// Walk the schedule one t per iteration inside a single run instead of
  /// tracing every t separately.
  bool per_iteration_t = false;
};

struct TraceFrame {
  int iteration = 0;
  double t = 0.0;
  Matrix centroids;
  std::vector<int> labels;
  double objective = 0.0;
};

/// One frame list per traced run (a single list in per-iteration mode).
std::vector<std::vector<TraceFrame>> trace(const Matrix& x, const TraceOptions& options);

/// frame_NNNN.csv files (rows: kind,id,cluster,x0..) and frames.csv index.
void write_trace(const std::vector<TraceFrame>& frames, const Matrix& x, const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------

struct Series {
  std::string name;
  std::vector<double> ys;
};

/// Minimal line chart: axes, tick labels, one polyline per series.
std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::vector<double>& xs,
                           const std::vector<Series>& series, bool log_x);

}  // namespace rnkm::harness
