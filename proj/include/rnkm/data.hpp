#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rnkm/matrix.hpp"
#include "rnkm/random.hpp"

namespace rnkm::data {

/// Feature matrix plus optional ground truth. String labels are numbered in
/// order of first appearance; `label_names[i]` is the text for label i.
struct DataSet {
  Matrix values;
  std::vector<std::string> feature_names;
  std::optional<std::vector<int>> labels;
  std::vector<std::string> label_names;
};

struct CsvOptions {
  char delimiter = ',';
  bool has_header = true;
  std::optional<std::string> label_column;  // by header name
  std::optional<std::size_t> label_index;   // by 0-based position
};

DataSet parse_csv(std::string_view text, const CsvOptions& options = {}, const std::string& source = "<memory>");
DataSet load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Shortest round-trip decimal text for a double.
std::string format_double(double v);

std::string to_csv(const DataSet& data, char delimiter = ',');
void write_csv(const std::filesystem::path& path, const DataSet& data, char delimiter = ',');

struct NormalizedMatrix {
  Matrix values;
  std::vector<bool> constant_columns;  // mapped to all zeros
};

/// Per-column (x - min) / (max - min).
NormalizedMatrix minmax_normalize(const Matrix& x);

enum class Distribution {
  UniformReal,
  UniformInt,
  Normal,
  Exponential,
  UniformDiscrete,
  Binomial,
  Gamma,
  Lognormal,
  Poisson,
  Bernoulli,
};

std::string to_string(Distribution dist);
Distribution distribution_from_string(const std::string& name);
const std::vector<Distribution>& all_distributions();

struct SyntheticSpec {
  Distribution distribution = Distribution::UniformReal;
  std::map<std::string, double> params;  // missing keys take the defaults below
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
};

/// Parameter names and defaults:
///   uniform_real      low=0 high=100        uniform_int   low=0 high=100
///   normal            mean=0 sd=1           exponential   lambda=0.5
///   uniform_discrete  low=0 high=9          binomial      trials=10 p=0.5
///   gamma             shape=1 scale=2       lognormal     mean=0 sd=1 (log scale)
///   poisson           lambda=2              bernoulli     p=0.3
std::map<std::string, double> default_params(Distribution dist);

/// The benchmark's synthetic row: default parameters plus instance count,
/// dimension and cluster count.
struct SyntheticPreset {
  SyntheticSpec spec;
  int clusters = 0;
};
SyntheticPreset benchmark_preset(Distribution dist, std::uint64_t seed = 0);

/// Draws from one distribution with the pinned recipes: inverse CDF for the
/// exponential, Box-Muller (both outputs used, in order) for the normal,
/// Marsaglia-Tsang for the gamma, exp of a normal for the lognormal, Knuth's
/// product method for the Poisson, and comparisons of uniforms for the
/// Bernoulli and binomial.
class Sampler {
 public:
  Sampler(Distribution dist, std::map<std::string, double> params, std::uint64_t seed);
  double operator()();

 private:
  double normal();
  double gamma(double shape);

  Distribution dist_;
  std::map<std::string, double> params_;
  Rng rng_;
  std::optional<double> spare_normal_;
};

/// n x d i.i.d. matrix filled row-major from a single stream.
Matrix gen_synthetic(const SyntheticSpec& spec);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};
Moments analytic_moments(Distribution dist, const std::map<std::string, double>& params);

struct ManifestEntry {
  std::string id;
  std::filesystem::path path;
  CsvOptions csv;
  std::optional<std::size_t> expected_n;
  std::optional<std::size_t> expected_d;
};

/// JSON: {"datasets": [{"id", "path", "label_column"?, "delimiter"?, "header"?, "n"?, "d"?}]}.
/// Relative paths resolve against the manifest's directory.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

/// Loads an entry and checks its shape against the expected (n, d).
DataSet load_entry(const ManifestEntry& entry);

}  // namespace rnkm::data
