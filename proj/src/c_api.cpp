#include "rnkm/rnkm.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <new>
#include <sstream>

#include "json.hpp"
#include "rnkm/clustering.hpp"
#include "rnkm/data.hpp"
#include "rnkm/error.hpp"
#include "rnkm/harness.hpp"
#include "rnkm/pmspace.hpp"
#include "rnkm/validation.hpp"

struct rnkm_dataset {
  rnkm::data::DataSet data;
};

struct rnkm_result {
  rnkm::cluster::ClusteringResult result;
};

namespace {

using namespace rnkm;

thread_local std::string g_last_error;

rnkm_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return RNKM_ERR_INVALID_ARGUMENT;
    case ErrorCode::Domain: return RNKM_ERR_DOMAIN;
    case ErrorCode::Io: return RNKM_ERR_IO;
    case ErrorCode::Parse: return RNKM_ERR_PARSE;
    case ErrorCode::Numeric: return RNKM_ERR_NUMERIC;
  }
  return RNKM_ERR_INTERNAL;
}

template <class F>
rnkm_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return RNKM_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return RNKM_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RNKM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RNKM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RNKM_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw_invalid(what);
}

std::vector<double> t_list(const double* t_values, std::size_t count) {
  require(t_values != nullptr && count > 0, "t list is empty");
  return {t_values, t_values + count};
}

// Renumbers arbitrary integer labels to 0..k-1 by ascending value.
cluster::Partition compact(const int* labels, std::size_t n) {
  std::vector<int> sorted(labels, labels + n);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), labels[i]) - sorted.begin());
  return cluster::Partition::from_labels(std::move(out), static_cast<int>(sorted.size()));
}

void fill_report(const validate::ValidationReport& r, rnkm_report* out) {
  out->silhouette = r.silhouette;
  out->davies_bouldin = r.davies_bouldin;
  out->calinski_harabasz = r.calinski_harabasz;
  out->distortion = r.distortion;
  out->has_ari = r.ari.has_value();
  out->ari = r.ari.value_or(std::nan(""));
}

data::SyntheticSpec synthetic_from_json(const nlohmann::json& j) {
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

data::DataSet synthetic_dataset(const data::SyntheticSpec& spec) {
  data::DataSet ds;
  ds.values = data::gen_synthetic(spec);
  for (std::size_t c = 0; c < spec.d; ++c) ds.feature_names.push_back("x" + std::to_string(c));
  return ds;
}

}  // namespace

extern "C" {

const char* rnkm_version(void) { return "1.0.0"; }

const char* rnkm_status_name(rnkm_status status) {
  switch (status) {
    case RNKM_OK: return "RNKM_OK";
    case RNKM_ERR_INVALID_ARGUMENT: return "RNKM_ERR_INVALID_ARGUMENT";
    case RNKM_ERR_DOMAIN: return "RNKM_ERR_DOMAIN";
    case RNKM_ERR_IO: return "RNKM_ERR_IO";
    case RNKM_ERR_PARSE: return "RNKM_ERR_PARSE";
    case RNKM_ERR_NUMERIC: return "RNKM_ERR_NUMERIC";
    case RNKM_ERR_INTERNAL: return "RNKM_ERR_INTERNAL";
  }
  return "RNKM_ERR_UNKNOWN";
}

const char* rnkm_last_error(void) { return g_last_error.c_str(); }

void rnkm_free(void* ptr) { std::free(ptr); }

rnkm_status rnkm_gamma(double r, double t, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = pm::gamma_ddf(r, t);
  });
}

rnkm_status rnkm_tnorm_apply(rnkm_tnorm tnorm, double a, double b, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    pm::TNorm n;
    switch (tnorm) {
      case RNKM_TNORM_MIN: n = pm::TNorm::Min; break;
      case RNKM_TNORM_PRODUCT: n = pm::TNorm::Product; break;
      case RNKM_TNORM_LUKASIEWICZ: n = pm::TNorm::Lukasiewicz; break;
      default: throw_invalid("unknown t-norm");
    }
    *out = pm::tnorm_apply(n, a, b);
  });
}

rnkm_status rnkm_t_grid(double lo, double hi, size_t steps, int log_spaced, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const auto grid = cluster::t_grid(lo, hi, steps, log_spaced != 0);
    std::copy(grid.begin(), grid.end(), out);
  });
}

rnkm_status rnkm_dataset_load_csv(const char* path, const char* label_column, int has_header, rnkm_dataset** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    data::CsvOptions opts;
    opts.has_header = has_header != 0;
    if (label_column && *label_column) opts.label_column = label_column;
    *out = new rnkm_dataset{data::load_csv(path, opts)};
  });
}

rnkm_status rnkm_dataset_open(const char* input, const char* label_column, rnkm_dataset** out) {
  return guarded([&] {
    require(input != nullptr && out != nullptr, "null argument");
    std::string in(input);
    const auto first = in.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && in[first] == '{') {
      *out = new rnkm_dataset{synthetic_dataset(synthetic_from_json(nlohmann::json::parse(in)))};
      return;
    }
    const std::filesystem::path path(in);
    if (path.extension() == ".json") {
      std::ifstream f(path);
      if (!f) throw Error(ErrorCode::Io, "cannot open '" + in + "'");
      nlohmann::json j;
      try {
        f >> j;
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, in + ": " + e.what());
      }
      *out = new rnkm_dataset{synthetic_dataset(synthetic_from_json(j))};
      return;
    }
    data::CsvOptions opts;
    if (label_column && *label_column) opts.label_column = label_column;
    *out = new rnkm_dataset{data::load_csv(path, opts)};
  });
}

rnkm_status rnkm_dataset_from_array(const double* values, size_t n, size_t d, const int* labels, rnkm_dataset** out) {
  return guarded([&] {
    require(values != nullptr && out != nullptr, "null argument");
    require(n > 0 && d > 0, "data set must be non-empty");
    auto ds = std::make_unique<rnkm_dataset>();
    ds->data.values = Matrix(n, d, std::vector<double>(values, values + n * d));
    if (!ds->data.values.all_finite()) throw_domain("data contains non-finite values");
    for (std::size_t c = 0; c < d; ++c) ds->data.feature_names.push_back("x" + std::to_string(c));
    if (labels) ds->data.labels = std::vector<int>(labels, labels + n);
    *out = ds.release();
  });
}

rnkm_status rnkm_dataset_generate(const char* dist, const char* params_json, size_t n, size_t d, uint64_t seed,
                                  rnkm_dataset** out) {
  return guarded([&] {
    require(dist != nullptr && out != nullptr, "null argument");
    data::SyntheticSpec spec;
    spec.distribution = data::distribution_from_string(dist);
    const auto preset = data::benchmark_preset(spec.distribution);
    spec.n = n ? n : preset.spec.n;
    spec.d = d ? d : preset.spec.d;
    spec.seed = seed;
    if (params_json && *params_json) {
      const auto j = nlohmann::json::parse(params_json);
      require(j.is_object(), "parameters must be a JSON object");
      for (const auto& [key, value] : j.items()) spec.params[key] = value.get<double>();
    }
    *out = new rnkm_dataset{synthetic_dataset(spec)};
  });
}

rnkm_status rnkm_dataset_normalize(rnkm_dataset* ds) {
  return guarded([&] {
    require(ds != nullptr, "null data set");
    ds->data.values = data::minmax_normalize(ds->data.values).values;
  });
}

rnkm_status rnkm_dataset_write_csv(const rnkm_dataset* ds, const char* path) {
  return guarded([&] {
    require(ds != nullptr && path != nullptr, "null argument");
    data::write_csv(path, ds->data);
  });
}

void rnkm_dataset_free(rnkm_dataset* ds) { delete ds; }

size_t rnkm_dataset_rows(const rnkm_dataset* ds) { return ds ? ds->data.values.rows() : 0; }
size_t rnkm_dataset_cols(const rnkm_dataset* ds) { return ds ? ds->data.values.cols() : 0; }
const double* rnkm_dataset_values(const rnkm_dataset* ds) { return ds ? ds->data.values.data() : nullptr; }
const int* rnkm_dataset_labels(const rnkm_dataset* ds) {
  return ds && ds->data.labels ? ds->data.labels->data() : nullptr;
}

rnkm_status rnkm_labels_load(const char* path, int** labels, size_t* n) {
  return guarded([&] {
    require(path != nullptr && labels != nullptr && n != nullptr, "null argument");
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, std::string("cannot open '") + path + "'");
    std::map<std::string, int> ids;
    std::vector<int> out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (header) {
        header = false;
        continue;
      }
      if (line.empty()) continue;
      std::string field = line.substr(0, line.find(','));
      if (field.size() >= 2 && field.front() == '"' && field.back() == '"') field = field.substr(1, field.size() - 2);
      const auto [it, fresh] = ids.emplace(field, static_cast<int>(ids.size()));
      out.push_back(it->second);
    }
    if (out.empty()) throw Error(ErrorCode::Parse, std::string(path) + ": no labels after the header line");
    auto* buf = static_cast<int*>(std::malloc(out.size() * sizeof(int)));
    if (!buf) throw std::bad_alloc();
    std::copy(out.begin(), out.end(), buf);
    *labels = buf;
    *n = out.size();
  });
}

void rnkm_run_options_init(rnkm_run_options* o) {
  if (!o) return;
  *o = rnkm_run_options{};
  o->algorithm = RNKM_ALGO_RNKM;
  o->k = 2;
  o->max_iters = 300;
  o->tol = 1e-6;
  o->fcm_m = 2.0;
  o->sigma = 0.0;
}

rnkm_status rnkm_run(const rnkm_dataset* ds, const rnkm_run_options* o, rnkm_result** out) {
  return guarded([&] {
    require(ds != nullptr && o != nullptr && out != nullptr, "null argument");
    const Matrix& x = ds->data.values;
    const std::size_t k = o->k;
    const cluster::IterationOptions it{o->max_iters, o->tol};
    auto res = std::make_unique<rnkm_result>();
    switch (o->algorithm) {
      case RNKM_ALGO_KM: res->result = cluster::lloyd_kmeans(x, k, cluster::random_init(x, k, o->seed), it); break;
      case RNKM_ALGO_KMPP:
        res->result = cluster::lloyd_kmeans(x, k, cluster::kmeanspp_init(x, k, o->seed), it);
        break;
      case RNKM_ALGO_KPKM: {
        double sigma = o->sigma > 0.0 ? o->sigma : cluster::median_pairwise_distance(x);
        if (!(sigma > 0.0)) sigma = 1.0;
        res->result = cluster::kpkm(x, k, {sigma}, o->seed, it).result;
        break;
      }
      case RNKM_ALGO_FCM: res->result = cluster::fcm(x, k, o->fcm_m, o->seed, it).result; break;
      case RNKM_ALGO_RNKM: {
        const auto grid = o->t_values ? t_list(o->t_values, o->t_count) : cluster::t_grid(0.1, 10.0, 50, true);
        cluster::RnkmSweepOptions so;
        so.iteration = it;
        so.seed = o->seed;
        res->result = cluster::rnkm(x, k, grid, so).best;
        break;
      }
      default: throw_invalid("unknown algorithm");
    }
    *out = res.release();
  });
}

void rnkm_result_free(rnkm_result* r) { delete r; }

size_t rnkm_result_k(const rnkm_result* r) { return r ? static_cast<size_t>(r->result.partition.k) : 0; }
size_t rnkm_result_size(const rnkm_result* r) { return r ? r->result.partition.size() : 0; }
const int* rnkm_result_labels(const rnkm_result* r) { return r ? r->result.partition.labels.data() : nullptr; }
const double* rnkm_result_centroids(const rnkm_result* r) { return r ? r->result.centroids.data() : nullptr; }
double rnkm_result_t(const rnkm_result* r) { return r && r->result.t ? *r->result.t : std::nan(""); }
int rnkm_result_iterations(const rnkm_result* r) { return r ? r->result.iterations : 0; }
int rnkm_result_converged(const rnkm_result* r) { return r && r->result.converged ? 1 : 0; }
const double* rnkm_result_trace(const rnkm_result* r, size_t* length) {
  if (length) *length = r ? r->result.objective_trace.size() : 0;
  return r ? r->result.objective_trace.data() : nullptr;
}

rnkm_status rnkm_elbow(const rnkm_dataset* ds, int k_min, int k_max, uint64_t seed, int* k_out) {
  return guarded([&] {
    require(ds != nullptr && k_out != nullptr, "null argument");
    *k_out = cluster::elbow_select_k(ds->data.values, k_min, k_max, cluster::ElbowRunner::Lloyd, seed).k;
  });
}

rnkm_status rnkm_validate(const rnkm_dataset* ds, const int* predicted, size_t n, const int* truth, size_t truth_n,
                          rnkm_report* out) {
  return guarded([&] {
    require(ds != nullptr && predicted != nullptr && out != nullptr, "null argument");
    const Matrix& x = ds->data.values;
    if (n != x.rows())
      throw_invalid("predicted labels have " + std::to_string(n) + " entries but the data has " +
                    std::to_string(x.rows()) + " rows");
    if (truth && truth_n != n)
      throw_invalid("true labels have " + std::to_string(truth_n) + " entries but predicted labels have " +
                    std::to_string(n));
    const auto partition = compact(predicted, n);
    const Matrix centroids = cluster::cluster_means(x, partition.labels, Matrix(partition.k, x.cols()));
    std::optional<std::span<const int>> t;
    if (truth) t = std::span<const int>(truth, truth_n);
    fill_report(validate::evaluate(x, partition, centroids, t), out);
  });
}

rnkm_status rnkm_result_evaluate(const rnkm_dataset* ds, const rnkm_result* r, rnkm_report* out) {
  return guarded([&] {
    require(ds != nullptr && r != nullptr && out != nullptr, "null argument");
    std::optional<std::span<const int>> t;
    if (ds->data.labels) t = std::span<const int>(*ds->data.labels);
    fill_report(validate::evaluate(ds->data.values, r->result.partition, r->result.centroids, t), out);
  });
}

rnkm_status rnkm_adjusted_rand_index(const int* a, const int* b, size_t n, double* out) {
  return guarded([&] {
    require(a != nullptr && b != nullptr && out != nullptr, "null argument");
    *out = validate::adjusted_rand_index({a, n}, {b, n});
  });
}

rnkm_status rnkm_rand_index(const int* a, const int* b, size_t n, double* out) {
  return guarded([&] {
    require(a != nullptr && b != nullptr && out != nullptr, "null argument");
    *out = validate::rand_index({a, n}, {b, n});
  });
}

rnkm_status rnkm_bench(const char* config_path, const char* out_dir) {
  return guarded([&] {
    require(config_path != nullptr && out_dir != nullptr, "null argument");
    const auto cfg = harness::load_bench_config(config_path);
    harness::write_bench(harness::run_bench(cfg), out_dir);
  });
}

rnkm_status rnkm_sweep_t(const rnkm_dataset* ds, size_t k, const double* t_values, size_t t_count, uint64_t seed,
                         int log_x, int svg, const char* out_dir) {
  return guarded([&] {
    require(ds != nullptr && out_dir != nullptr, "null argument");
    harness::SweepOptions so;
    so.k = k;
    so.t_values = t_list(t_values, t_count);
    so.seed = seed;
    harness::write_sweep(harness::sweep_t(ds->data, so), out_dir, svg != 0, log_x != 0);
  });
}

rnkm_status rnkm_trace(const rnkm_dataset* ds, size_t k, const double* t_values, size_t t_count, uint64_t seed,
                       int max_iters, int per_iteration_t, const char* out_dir) {
  return guarded([&] {
    require(ds != nullptr && out_dir != nullptr, "null argument");
    harness::TraceOptions to;
    to.k = k;
    to.t_schedule = t_list(t_values, t_count);
    to.seed = seed;
    to.per_iteration_t = per_iteration_t != 0;
    if (max_iters > 0) to.iteration.max_iters = max_iters;
    const auto runs = harness::trace(ds->data.values, to);
    const std::filesystem::path dir(out_dir);
    if (to.per_iteration_t) {
      harness::write_trace(runs.front(), ds->data.values, dir);
    } else {
      for (std::size_t i = 0; i < runs.size(); ++i)
        harness::write_trace(runs[i], ds->data.values, dir / ("t_" + std::to_string(i)));
    }
  });
}

}  // extern "C"
