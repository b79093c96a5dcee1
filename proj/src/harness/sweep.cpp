#include <cmath>
#include <cstdio>
#include <fstream>

#include "rnkm/error.hpp"
#include "rnkm/harness.hpp"

namespace rnkm::harness {
namespace {

std::string cell(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return data::format_double(v);
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create '" + dir.string() + "': " + ec.message());
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  f << body;
}

void check_k(std::size_t k, std::size_t n) {
  if (k < 2 || k > n) throw_invalid("k must lie in [2, n]; got k=" + std::to_string(k) + ", n=" + std::to_string(n));
}

}  // namespace

std::vector<SweepRow> sweep_t(const data::DataSet& data, const SweepOptions& options) {
  const Matrix& x = data.values;
  check_k(options.k, x.rows());
  if (options.t_values.empty()) throw_invalid("sweep needs at least one t");
  std::optional<std::span<const int>> truth;
  if (data.labels) truth = std::span<const int>(*data.labels);

  std::vector<SweepRow> rows;
  for (double t : options.t_values) {
    SweepRow row;
    row.t = t;
    try {
      if (!(t > 0.0) || !std::isfinite(t)) throw_domain("t must be positive and finite");
      const Matrix init = cluster::spectral_sampling_init(x, options.k, t, options.seed);
      const auto result = cluster::rnkm_single_t(x, options.k, t, init, options.iteration);
      row.objective = cluster::objective_rnkm(x, result.partition.labels, result.centroids, t);
      row.iterations = result.iterations;
      row.report = validate::evaluate(x, result.partition, result.centroids, truth);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "t,SI,Da,Di,Ca,ARI,objective,iters,status\n";
  for (const auto& r : rows) {
    out += cell(r.t) + ",";
    if (r.report) {
      out += cell(r.report->silhouette) + "," + cell(r.report->davies_bouldin) + "," + cell(r.report->distortion) + "," +
             cell(r.report->calinski_harabasz) + "," + (r.report->ari ? cell(*r.report->ari) : "NA") + "," +
             cell(r.objective) + ",";
    } else {
      out += "NA,NA,NA,NA,NA,NA,";
    }
    out += std::to_string(r.iterations) + ",";
    if (r.error.empty()) {
      out += "ok";
    } else {
      std::string msg = r.error;
      for (char& c : msg)
        if (c == ',' || c == '\n' || c == '"') c = ' ';
      out += "error: " + msg;
    }
    out += "\n";
  }
  return out;
}

void write_sweep(const std::vector<SweepRow>& rows, const std::filesystem::path& out_dir, bool svg, bool log_x) {
  ensure_dir(out_dir);
  write_file(out_dir / "sweep.csv", sweep_csv(rows));
  if (!svg) return;

  struct Index {
    const char* name;
    double (*get)(const validate::ValidationReport&);
  };
  const Index indices[] = {
      {"SI", [](const validate::ValidationReport& r) { return r.silhouette; }},
      {"Da", [](const validate::ValidationReport& r) { return r.davies_bouldin; }},
      {"Di", [](const validate::ValidationReport& r) { return r.distortion; }},
      {"Ca", [](const validate::ValidationReport& r) { return r.calinski_harabasz; }},
      {"ARI", [](const validate::ValidationReport& r) { return r.ari.value_or(std::nan("")); }},
  };
  std::vector<double> xs;
  for (const auto& r : rows) xs.push_back(r.t);
  for (const auto& idx : indices) {
    Series s{idx.name, {}};
    bool any = false;
    for (const auto& r : rows) {
      const double v = r.report ? idx.get(*r.report) : std::nan("");
      any = any || std::isfinite(v);
      s.ys.push_back(v);
    }
    if (!any) continue;
    write_file(out_dir / (std::string("sweep_") + idx.name + ".svg"),
               svg_line_chart(std::string(idx.name) + " vs t", "t", xs, {s}, log_x));
  }
}

std::vector<std::vector<TraceFrame>> trace(const Matrix& x, const TraceOptions& options) {
  check_k(options.k, x.rows());
  if (options.t_schedule.empty()) throw_invalid("trace needs at least one t");
  for (double t : options.t_schedule)
    if (!(t > 0.0) || !std::isfinite(t)) throw_domain("t must be positive and finite");

  auto to_frame = [](const cluster::Frame& f) {
    return TraceFrame{f.iteration, f.t, *f.centroids, *f.labels, f.objective};
  };

  std::vector<std::vector<TraceFrame>> runs;
  if (!options.per_iteration_t) {
    for (double t : options.t_schedule) {
      std::vector<TraceFrame> frames;
      const Matrix init = cluster::spectral_sampling_init(x, options.k, t, options.seed);
      cluster::rnkm_single_t(x, options.k, t, init, options.iteration,
                             [&](const cluster::Frame& f) { frames.push_back(to_frame(f)); });
      runs.push_back(std::move(frames));
    }
    return runs;
  }

  // One run; iteration i uses schedule[i], holding the last value once the
  // schedule is exhausted until the centroids settle.
  const auto& schedule = options.t_schedule;
  const Matrix init = cluster::spectral_sampling_init(x, options.k, schedule.front(), options.seed);
  cluster::RnkmStepper stepper(x, init, schedule.front());
  std::vector<TraceFrame> frames;
  auto record = [&](int it) {
    const auto& labels = stepper.labels();
    frames.push_back({it, stepper.t(), stepper.centroids(), labels,
                      cluster::objective_rnkm(x, labels, stepper.centroids(), stepper.t())});
  };
  // Frame 0 shows the starting centroids with their initial assignment.
  {
    const auto labels = cluster::rnkm_assign(x, init, schedule.front());
    frames.push_back({0, schedule.front(), init, labels, cluster::objective_rnkm(x, labels, init, schedule.front())});
  }
  for (int it = 1; it <= options.iteration.max_iters; ++it) {
    const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(it - 1), schedule.size() - 1);
    const double shift = stepper.step(schedule[idx]);
    record(it);
    if (static_cast<std::size_t>(it) >= schedule.size() && shift <= options.iteration.tol) break;
  }
  runs.push_back(std::move(frames));
  return runs;
}

void write_trace(const std::vector<TraceFrame>& frames, const Matrix& x, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  std::string header = "kind,id,cluster";
  for (std::size_t c = 0; c < x.cols(); ++c) header += ",x" + std::to_string(c);
  header += "\n";

  std::string index = "frame,iteration,t,objective,file\n";
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto& fr = frames[f];
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.csv", f);
    std::string body = header;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      body += "point," + std::to_string(i) + "," + std::to_string(fr.labels.at(i));
      for (double v : x.row(i)) body += "," + cell(v);
      body += "\n";
    }
    for (std::size_t j = 0; j < fr.centroids.rows(); ++j) {
      body += "centroid," + std::to_string(j) + "," + std::to_string(j);
      for (double v : fr.centroids.row(j)) body += "," + cell(v);
      body += "\n";
    }
    write_file(out_dir / name, body);
    index += std::to_string(f) + "," + std::to_string(fr.iteration) + "," + cell(fr.t) + "," + cell(fr.objective) +
             "," + name + "\n";
  }
  write_file(out_dir / "frames.csv", index);
}

}  // namespace rnkm::harness
