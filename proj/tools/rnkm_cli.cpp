// rnkm: command-line front end over the C API.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rnkm/rnkm.h"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;

struct Failure {
  rnkm_status status;
};

void emit_error(const std::string& status, int code, const std::string& message) {
  json err{{"error", {{"status", status}, {"code", code}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
}

void check(rnkm_status s) {
  if (s != RNKM_OK) throw Failure{s};
}

struct Dataset {
  rnkm_dataset* ptr = nullptr;
  ~Dataset() { rnkm_dataset_free(ptr); }
};

struct Labels {
  int* ptr = nullptr;
  size_t n = 0;
  ~Labels() { rnkm_free(ptr); }
};

json finite_or_string(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

void open_input(Dataset& ds, const std::string& input, const std::string& label_column, bool normalize) {
  check(rnkm_dataset_open(input.c_str(), label_column.empty() ? nullptr : label_column.c_str(), &ds.ptr));
  if (normalize) check(rnkm_dataset_normalize(ds.ptr));
}

std::vector<double> grid(double lo, double hi, std::size_t steps, bool log_spaced) {
  std::vector<double> out(steps);
  check(rnkm_t_grid(lo, hi, steps, log_spaced ? 1 : 0, out.data()));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random normed k-means toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rnkm_version()));

  // bench
  std::string bench_config, bench_out;
  auto* bench = app.add_subcommand("bench", "Run a benchmark configuration");
  bench->add_option("--config", bench_config, "Bench configuration JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", bench_out, "Output directory")->required();

  // sweep-t
  std::string sw_input, sw_out, sw_label;
  std::size_t sw_k = 0, sw_steps = 50;
  double sw_min = 0.1, sw_max = 10.0;
  bool sw_log = false, sw_svg = false, sw_raw = false;
  std::uint64_t sw_seed = 0;
  auto* sweep = app.add_subcommand("sweep-t", "Run RNKM across a grid of t values");
  sweep->add_option("--input", sw_input, "CSV file or synthetic spec (JSON file or inline JSON)")->required();
  sweep->add_option("--k", sw_k, "Number of clusters")->required()->check(CLI::PositiveNumber);
  sweep->add_option("--t-min", sw_min, "Smallest t")->capture_default_str();
  sweep->add_option("--t-max", sw_max, "Largest t")->capture_default_str();
  sweep->add_option("--t-steps", sw_steps, "Number of grid points")->capture_default_str();
  sweep->add_flag("--log", sw_log, "Logarithmic grid spacing");
  sweep->add_option("--seed", sw_seed, "Seed")->capture_default_str();
  sweep->add_option("--out", sw_out, "Output directory")->required();
  sweep->add_option("--label-column", sw_label, "CSV column holding ground truth");
  sweep->add_flag("--svg", sw_svg, "Write one SVG chart per index");
  sweep->add_flag("--no-normalize", sw_raw, "Skip min-max normalization");

  // trace
  std::string tr_input, tr_out, tr_label;
  std::size_t tr_k = 0;
  std::vector<double> tr_t;
  std::uint64_t tr_seed = 0;
  int tr_iters = 0;
  bool tr_per_iter = false, tr_raw = false;
  auto* tr = app.add_subcommand("trace", "Export per-iteration centroid frames");
  tr->add_option("--input", tr_input, "CSV file or synthetic spec")->required();
  tr->add_option("--k", tr_k, "Number of clusters")->required()->check(CLI::PositiveNumber);
  tr->add_option("--t", tr_t, "t values (comma separated)")->required()->delimiter(',');
  tr->add_option("--seed", tr_seed, "Seed")->capture_default_str();
  tr->add_option("--out", tr_out, "Output directory")->required();
  tr->add_option("--max-iters", tr_iters, "Iteration cap (default 300)");
  tr->add_option("--label-column", tr_label, "CSV column holding ground truth");
  tr->add_flag("--per-iteration-t", tr_per_iter, "Advance through the t list one iteration at a time");
  tr->add_flag("--no-normalize", tr_raw, "Skip min-max normalization");

  // gen
  std::string gen_dist, gen_out;
  std::vector<std::string> gen_params;
  std::size_t gen_n = 0, gen_d = 0;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic data set");
  gen->add_option("--dist", gen_dist, "Distribution name")->required();
  gen->add_option("--params", gen_params, "Distribution parameters as key=value")->delimiter(',');
  gen->add_option("--n", gen_n, "Rows (default: benchmark preset)");
  gen->add_option("--d", gen_d, "Columns (default: benchmark preset)");
  gen->add_option("--seed", gen_seed, "Seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output CSV path")->required();

  // validate
  std::string va_input, va_labels, va_pred, va_label_col;
  bool va_raw = false;
  auto* va = app.add_subcommand("validate", "Score a labeling with the validation indices");
  va->add_option("--input", va_input, "Data CSV")->required();
  va->add_option("--labels", va_labels, "Ground-truth label file (header line, one label per line)");
  va->add_option("--pred", va_pred, "Predicted label file (header line, one label per line)")->required();
  va->add_option("--label-column", va_label_col, "Data CSV column to drop as a label column");
  va->add_flag("--no-normalize", va_raw, "Skip min-max normalization");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("usage", kExitUsage, e.what());
    return kExitUsage;
  }

  try {
    if (*bench) {
      check(rnkm_bench(bench_config.c_str(), bench_out.c_str()));
      std::cout << json{{"out", bench_out}}.dump() << "\n";
    } else if (*sweep) {
      Dataset ds;
      open_input(ds, sw_input, sw_label, !sw_raw);
      const auto ts = grid(sw_min, sw_max, sw_steps, sw_log);
      check(rnkm_sweep_t(ds.ptr, sw_k, ts.data(), ts.size(), sw_seed, sw_log, sw_svg, sw_out.c_str()));
      std::cout << json{{"out", sw_out}, {"rows", ts.size()}}.dump() << "\n";
    } else if (*tr) {
      Dataset ds;
      open_input(ds, tr_input, tr_label, !tr_raw);
      check(rnkm_trace(ds.ptr, tr_k, tr_t.data(), tr_t.size(), tr_seed, tr_iters, tr_per_iter, tr_out.c_str()));
      std::cout << json{{"out", tr_out}}.dump() << "\n";
    } else if (*gen) {
      json params = json::object();
      for (const auto& kv : gen_params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--params", "expected key=value, got " + kv);
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(kv.substr(eq + 1), &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != kv.size() - eq - 1)
          throw CLI::ValidationError("--params", "value of " + kv.substr(0, eq) + " is not a number");
        params[kv.substr(0, eq)] = v;
      }
      Dataset ds;
      const std::string pj = params.dump();
      check(rnkm_dataset_generate(gen_dist.c_str(), pj.c_str(), gen_n, gen_d, gen_seed, &ds.ptr));
      check(rnkm_dataset_write_csv(ds.ptr, gen_out.c_str()));
      std::cout << json{{"out", gen_out}, {"n", rnkm_dataset_rows(ds.ptr)}, {"d", rnkm_dataset_cols(ds.ptr)}}.dump()
                << "\n";
    } else if (*va) {
      Dataset ds;
      check(rnkm_dataset_load_csv(va_input.c_str(), va_label_col.empty() ? nullptr : va_label_col.c_str(), 1,
                                  &ds.ptr));
      if (!va_raw) check(rnkm_dataset_normalize(ds.ptr));
      Labels pred, truth;
      check(rnkm_labels_load(va_pred.c_str(), &pred.ptr, &pred.n));
      if (!va_labels.empty()) check(rnkm_labels_load(va_labels.c_str(), &truth.ptr, &truth.n));
      rnkm_report r{};
      check(rnkm_validate(ds.ptr, pred.ptr, pred.n, truth.ptr, truth.n, &r));
      json report{{"n", pred.n},
                  {"SI", finite_or_string(r.silhouette)},
                  {"Da", finite_or_string(r.davies_bouldin)},
                  {"Di", finite_or_string(r.distortion)},
                  {"Ca", finite_or_string(r.calinski_harabasz)},
                  {"ARI", r.has_ari ? finite_or_string(r.ari) : json(nullptr)}};
      std::cout << report.dump(2) << "\n";
    }
  } catch (const Failure& f) {
    emit_error(rnkm_status_name(f.status), static_cast<int>(f.status), rnkm_last_error());
    return 1;
  } catch (const CLI::Error& e) {
    emit_error("usage", kExitUsage, e.what());
    return kExitUsage;
  }
  return 0;
}
