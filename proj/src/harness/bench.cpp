#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <thread>

#include "rnkm/error.hpp"
#include "rnkm/harness.hpp"

namespace rnkm::harness {
namespace {

using nlohmann::json;

constexpr Algorithm kAllAlgorithms[] = {Algorithm::KM, Algorithm::KMpp, Algorithm::KPKM, Algorithm::FCM,
                                        Algorithm::RNKM};

// Reported values for the bundled Iris set (min-max normalized, k = 3).
struct Reference {
  Algorithm algorithm;
  double si, da, di, ca, ari;
};
constexpr Reference kIrisReference[] = {
    {Algorithm::KM, 0.459, 0.833, 139.82, 452.12, 0.449},  {Algorithm::KMpp, 0.459, 0.833, 139.82, 452.12, 0.449},
    {Algorithm::KPKM, 0.544, 0.675, 79.40, 448.77, 0.442}, {Algorithm::FCM, 0.549, 0.669, 79.36, 452.12, 0.449},
    {Algorithm::RNKM, 0.680, 0.405, 78.85, 513.92, 0.539},
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::InvalidArgument, "config: " + what); }

data::SyntheticSpec parse_synthetic(const json& j) {
  data::SyntheticSpec spec;
  spec.distribution = data::distribution_from_string(j.at("dist").get<std::string>());
  const auto preset = data::benchmark_preset(spec.distribution);
  spec.n = j.value("n", preset.spec.n);
  spec.d = j.value("d", preset.spec.d);
  spec.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("params"))
    for (const auto& [key, value] : j["params"].items()) spec.params[key] = value.get<double>();
  return spec;
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "NA";
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  return data::format_double(*v);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

std::optional<double> index_value(const validate::ValidationReport& r, const std::string& index) {
  if (index == "SI") return r.silhouette;
  if (index == "Da") return r.davies_bouldin;
  if (index == "Di") return r.distortion;
  if (index == "Ca") return r.calinski_harabasz;
  if (index == "ARI") return r.ari;
  throw_invalid("unknown index '" + index + "'");
}

RunRecord run_cell(const PreparedData& prepared, int k, Algorithm algorithm, std::uint64_t seed,
                   const BenchConfig& config, const cluster::EigenCache* cache, double sigma) {
  RunRecord rec;
  rec.dataset = prepared.id;
  rec.algorithm = algorithm;
  rec.seed = seed;
  rec.k = k;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Matrix& x = prepared.data.values;
    const auto kk = static_cast<std::size_t>(k);
    cluster::ClusteringResult result;
    switch (algorithm) {
      case Algorithm::KM:
        result = cluster::lloyd_kmeans(x, kk, cluster::random_init(x, kk, seed), config.iteration);
        break;
      case Algorithm::KMpp:
        result = cluster::lloyd_kmeans(x, kk, cluster::kmeanspp_init(x, kk, seed), config.iteration);
        break;
      case Algorithm::KPKM: result = cluster::kpkm(x, kk, {sigma}, seed, config.iteration).result; break;
      case Algorithm::FCM: result = cluster::fcm(x, kk, config.fcm_m, seed, config.iteration).result; break;
      case Algorithm::RNKM: {
        cluster::RnkmSweepOptions opts{config.iteration, seed, config.score, cache};
        result = cluster::rnkm(x, kk, config.t_grid, opts).best;
        break;
      }
    }
    rec.t = result.t;
    rec.iterations = result.iterations;
    rec.converged = result.converged;
    std::optional<std::span<const int>> truth;
    if (prepared.data.labels) truth = std::span<const int>(*prepared.data.labels);
    rec.report = validate::evaluate(x, result.partition, result.centroids, truth);
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::KM: return "KM";
    case Algorithm::KMpp: return "KM++";
    case Algorithm::KPKM: return "KPKM";
    case Algorithm::FCM: return "FCM";
    case Algorithm::RNKM: return "RNKM";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& name) {
  const std::string n = lower(name);
  if (n == "km" || n == "kmeans") return Algorithm::KM;
  if (n == "km++" || n == "kmpp" || n == "kmeans++") return Algorithm::KMpp;
  if (n == "kpkm") return Algorithm::KPKM;
  if (n == "fcm") return Algorithm::FCM;
  if (n == "rnkm") return Algorithm::RNKM;
  throw_invalid("unknown algorithm '" + name + "'");
}

BenchConfig parse_bench_config(const json& doc, const std::filesystem::path& base_dir) {
  BenchConfig cfg;
  try {
    std::vector<data::ManifestEntry> manifest;
    if (doc.contains("manifest")) {
      std::filesystem::path p = doc["manifest"].get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      manifest = data::load_manifest(p);
    }

    if (!doc.contains("datasets") || !doc["datasets"].is_array() || doc["datasets"].empty())
      config_error("'datasets' must be a non-empty array");
    for (const auto& item : doc["datasets"]) {
      DatasetRef ref;
      ref.id = item.at("id").get<std::string>();
      if (item.contains("synthetic")) {
        ref.synthetic = parse_synthetic(item["synthetic"]);
      } else if (item.contains("path")) {
        data::ManifestEntry e;
        e.id = ref.id;
        e.path = item["path"].get<std::string>();
        if (e.path.is_relative()) e.path = base_dir / e.path;
        if (item.contains("label_column")) e.csv.label_column = item["label_column"].get<std::string>();
        if (item.contains("header")) e.csv.has_header = item["header"].get<bool>();
        if (item.contains("delimiter")) e.csv.delimiter = item["delimiter"].get<std::string>().at(0);
        if (item.contains("n")) e.expected_n = item["n"].get<std::size_t>();
        if (item.contains("d")) e.expected_d = item["d"].get<std::size_t>();
        ref.file = e;
      } else {
        const auto it = std::find_if(manifest.begin(), manifest.end(), [&](const auto& e) { return e.id == ref.id; });
        if (it == manifest.end()) config_error("data set '" + ref.id + "' has no path, synthetic spec or manifest entry");
        ref.file = *it;
      }
      if (item.contains("k")) {
        if (item["k"].is_string()) {
          if (item["k"].get<std::string>() != "elbow") config_error("k must be an integer or \"elbow\"");
        } else {
          ref.k = item["k"].get<int>();
          if (*ref.k < 2) config_error("k must be >= 2");
        }
      }
      cfg.datasets.push_back(std::move(ref));
    }

    if (!doc.contains("algorithms") || !doc["algorithms"].is_array() || doc["algorithms"].empty())
      config_error("'algorithms' must be a non-empty array");
    for (const auto& a : doc["algorithms"]) {
      const Algorithm alg = algorithm_from_string(a.get<std::string>());
      if (std::find(cfg.algorithms.begin(), cfg.algorithms.end(), alg) == cfg.algorithms.end())
        cfg.algorithms.push_back(alg);
    }

    if (!doc.contains("t_grid")) {
      cfg.t_grid = cluster::t_grid(0.1, 10.0, 50, true);
    } else if (doc["t_grid"].is_array()) {
      cfg.t_grid = doc["t_grid"].get<std::vector<double>>();
    } else {
      const auto& g = doc["t_grid"];
      cfg.t_grid = cluster::t_grid(g.value("min", 0.1), g.value("max", 10.0), g.value("steps", std::size_t{50}),
                                   g.value("log", true));
    }
    if (cfg.t_grid.empty()) config_error("t grid is empty");
    for (double t : cfg.t_grid)
      if (!(t > 0.0) || !std::isfinite(t)) config_error("t grid values must be positive");

    if (!doc.contains("seeds")) {
      cfg.seeds = {0};
    } else if (doc["seeds"].is_array()) {
      cfg.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
    } else {
      const auto count = doc["seeds"].value("count", std::uint64_t{1});
      const auto first = doc["seeds"].value("start", std::uint64_t{0});
      for (std::uint64_t s = 0; s < count; ++s) cfg.seeds.push_back(first + s);
    }
    if (cfg.seeds.empty()) config_error("no seeds");

    cfg.iteration.max_iters = doc.value("max_iters", cfg.iteration.max_iters);
    cfg.iteration.tol = doc.value("tol", cfg.iteration.tol);
    if (cfg.iteration.max_iters < 1 || !(cfg.iteration.tol >= 0.0)) config_error("bad max_iters/tol");
    if (doc.contains("score")) cfg.score = cluster::selection_score_from_string(doc["score"].get<std::string>());
    if (doc.contains("elbow_range")) {
      const auto r = doc["elbow_range"].get<std::vector<int>>();
      if (r.size() != 2 || r[0] < 2 || r[0] > r[1]) config_error("elbow_range must be [lo, hi] with 2 <= lo <= hi");
      cfg.elbow_min = r[0];
      cfg.elbow_max = r[1];
    }
    cfg.fcm_m = doc.value("fcm_m", cfg.fcm_m);
    if (!(cfg.fcm_m > 1.0)) config_error("fcm_m must be > 1");
    if (doc.contains("sigma")) {
      cfg.sigma = doc["sigma"].get<double>();
      if (!(*cfg.sigma > 0.0)) config_error("sigma must be > 0");
    }
    cfg.normalize = doc.value("normalize", true);
    cfg.threads = doc.value("threads", 0u);
  } catch (const json::exception& e) {
    config_error(e.what());
  }
  return cfg;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, "config '" + path.string() + "': " + e.what());
  }
  return parse_bench_config(doc, path.parent_path());
}

PreparedData prepare(const DatasetRef& ref, bool normalize) {
  PreparedData out;
  out.id = ref.id;
  if (ref.synthetic) {
    out.data.values = data::gen_synthetic(*ref.synthetic);
    for (std::size_t c = 0; c < out.data.values.cols(); ++c) out.data.feature_names.push_back("x" + std::to_string(c));
  } else if (ref.file) {
    out.data = data::load_entry(*ref.file);
  } else {
    throw_invalid("data set '" + ref.id + "' has no source");
  }
  if (normalize) {
    auto norm = data::minmax_normalize(out.data.values);
    out.data.values = std::move(norm.values);
    out.constant_columns = std::move(norm.constant_columns);
  }
  return out;
}

BenchOutput run_bench(const BenchConfig& config) {
  if (config.datasets.empty()) throw_invalid("config: no data sets");
  if (config.algorithms.empty()) throw_invalid("config: no algorithms");

  struct Task {
    std::size_t dataset;
    Algorithm algorithm;
    std::uint64_t seed;
  };
  struct DatasetState {
    PreparedData prepared;
    int k = 0;
    std::optional<cluster::ElbowResult> elbow;
    cluster::EigenCache cache;
    double sigma = 1.0;
    std::string error;
  };

  std::vector<DatasetState> states(config.datasets.size());
  std::vector<Task> tasks;
  for (std::size_t di = 0; di < config.datasets.size(); ++di) {
    auto& st = states[di];
    const auto& ref = config.datasets[di];
    try {
      st.prepared = prepare(ref, config.normalize);
      const Matrix& x = st.prepared.data.values;
      if (ref.k) {
        st.k = *ref.k;
      } else {
        const int hi = std::min<int>(config.elbow_max, static_cast<int>(x.rows()));
        st.elbow = cluster::elbow_select_k(x, config.elbow_min, hi, cluster::ElbowRunner::Lloyd, config.seeds.front(),
                                           1.0, config.iteration);
        st.k = st.elbow->k;
      }
      if (std::find(config.algorithms.begin(), config.algorithms.end(), Algorithm::RNKM) != config.algorithms.end())
        st.cache = cluster::EigenCache(x, config.t_grid);
      st.sigma = config.sigma.value_or(cluster::median_pairwise_distance(x));
      if (!(st.sigma > 0.0)) st.sigma = 1.0;
    } catch (const std::exception& e) {
      st.error = e.what();
    }
    for (Algorithm a : kAllAlgorithms) {
      if (std::find(config.algorithms.begin(), config.algorithms.end(), a) == config.algorithms.end()) continue;
      for (std::uint64_t seed : config.seeds) tasks.push_back({di, a, seed});
    }
  }

  std::vector<RunRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto& task = tasks[i];
      const auto& st = states[task.dataset];
      if (!st.error.empty()) {
        records[i].dataset = config.datasets[task.dataset].id;
        records[i].algorithm = task.algorithm;
        records[i].seed = task.seed;
        records[i].error = st.error;
        continue;
      }
      records[i] = run_cell(st.prepared, st.k, task.algorithm, task.seed, config, &st.cache, st.sigma);
    }
  };
  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(tasks.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  BenchOutput out;
  out.records = std::move(records);

  json summary;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  summary["generated_at"] = stamp;
  summary["cells"] = out.records.size();
  summary["failures"] = std::count_if(out.records.begin(), out.records.end(), [](const auto& r) { return !r.error.empty(); });
  summary["t_grid"] = config.t_grid;
  summary["seeds"] = config.seeds;
  summary["score"] = cluster::to_string(config.score);

  static const char* kIndices[] = {"SI", "Da", "Di", "Ca", "ARI"};
  for (std::size_t di = 0; di < states.size(); ++di) {
    const auto& st = states[di];
    const std::string& id = config.datasets[di].id;
    json ds;
    ds["k"] = st.k;
    ds["n"] = st.prepared.data.values.rows();
    ds["d"] = st.prepared.data.values.cols();
    if (st.elbow) ds["elbow"] = {{"ks", st.elbow->ks}, {"wcss", st.elbow->curve}};
    if (!st.error.empty()) ds["error"] = st.error;
    for (Algorithm a : config.algorithms) {
      json med;
      for (const char* idx : kIndices)
        if (auto m = median_index(out.records, id, a, idx)) med[idx] = number_or_string(*m);
      ds["median"][to_string(a)] = med;
    }
    if (lower(id) == "iris") {
      for (const auto& ref : kIrisReference) {
        if (std::find(config.algorithms.begin(), config.algorithms.end(), ref.algorithm) == config.algorithms.end())
          continue;
        const double published[] = {ref.si, ref.da, ref.di, ref.ca, ref.ari};
        json deltas;
        for (std::size_t i = 0; i < 5; ++i) {
          json entry{{"published", published[i]}};
          if (auto m = median_index(out.records, id, ref.algorithm, kIndices[i])) {
            entry["median"] = number_or_string(*m);
            if (std::isfinite(*m)) entry["delta"] = *m - published[i];
          }
          deltas[kIndices[i]] = entry;
        }
        ds["published_deltas"][to_string(ref.algorithm)] = deltas;
      }
    }
    summary["datasets"][id] = ds;
  }
  out.summary = std::move(summary);
  return out;
}

std::optional<double> median_index(const std::vector<RunRecord>& records, const std::string& dataset,
                                   Algorithm algorithm, const std::string& index) {
  std::vector<double> v;
  for (const auto& r : records) {
    if (r.dataset != dataset || r.algorithm != algorithm || !r.report) continue;
    if (auto x = index_value(*r.report, index)) v.push_back(*x);
  }
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::string records_csv(const std::vector<RunRecord>& records) {
  std::string out = "dataset,algo,seed,k,SI,Da,Di,Ca,ARI,t,iters,converged,status\n";
  for (const auto& r : records) {
    out += csv_escape(r.dataset) + "," + to_string(r.algorithm) + "," + std::to_string(r.seed) + "," +
           std::to_string(r.k) + ",";
    if (r.report) {
      out += cell(r.report->silhouette) + "," + cell(r.report->davies_bouldin) + "," + cell(r.report->distortion) + "," +
             cell(r.report->calinski_harabasz) + "," + cell(r.report->ari) + ",";
    } else {
      out += "NA,NA,NA,NA,NA,";
    }
    out += cell(r.t) + "," + std::to_string(r.iterations) + "," + (r.converged ? "1" : "0") + ",";
    out += r.error.empty() ? "ok" : csv_escape("error: " + r.error);
    out += "\n";
  }
  return out;
}

std::string timings_csv(const std::vector<RunRecord>& records) {
  std::string out = "dataset,algo,seed,ms\n";
  for (const auto& r : records)
    out += csv_escape(r.dataset) + "," + to_string(r.algorithm) + "," + std::to_string(r.seed) + "," +
           data::format_double(r.ms) + "\n";
  return out;
}

void write_bench(const BenchOutput& output, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create '" + out_dir.string() + "': " + ec.message());
  auto write = [&](const char* name, const std::string& body) {
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot write '" + (out_dir / name).string() + "'");
    f << body;
  };
  write("results.csv", records_csv(output.records));
  write("timings.csv", timings_csv(output.records));
  write("summary.json", output.summary.dump(2) + "\n");
}

}  // namespace rnkm::harness
