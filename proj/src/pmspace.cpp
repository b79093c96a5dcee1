#include "rnkm/pmspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rnkm/error.hpp"
#include "rnkm/random.hpp"

namespace rnkm::pm {
namespace {

void require_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw_domain(std::string("t-norm argument ") + name + " outside [0,1]");
}

void require_nonneg_finite(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) throw_domain(std::string(name) + " must be finite and >= 0");
}

}  // namespace

std::string to_string(TNorm norm) {
  switch (norm) {
    case TNorm::Min: return "min";
    case TNorm::Product: return "product";
    case TNorm::Lukasiewicz: return "lukasiewicz";
  }
  return "unknown";
}

TNorm tnorm_from_string(const std::string& name) {
  if (name == "min") return TNorm::Min;
  if (name == "product") return TNorm::Product;
  if (name == "lukasiewicz") return TNorm::Lukasiewicz;
  throw_invalid("unknown t-norm '" + name + "'");
}

std::string to_string(Axiom axiom) {
  switch (axiom) {
    case Axiom::Triangle: return "triangle";
    case Axiom::Scaling: return "scaling";
    case Axiom::NullVector: return "null-vector";
  }
  return "unknown";
}

double tnorm_apply(TNorm norm, double x, double y) {
  require_unit(x, "x");
  require_unit(y, "y");
  switch (norm) {
    case TNorm::Min: return std::min(x, y);
    case TNorm::Product: return x * y;
    case TNorm::Lukasiewicz: {
      // Written as lo - (1 - hi) so that 1 is an exact neutral element and
      // the result does not depend on argument order.
      const double hi = std::max(x, y), lo = std::min(x, y);
      return std::max(lo - (1.0 - hi), 0.0);
    }
  }
  throw_invalid("unknown t-norm");
}

double gamma_ddf(double norm_value, double t) {
  require_nonneg_finite(norm_value, "norm value");
  require_nonneg_finite(t, "t");
  if (t == 0.0) return 0.0;
  return t / (t + norm_value);
}

double ddf_evaluate(DdfFamily family, double norm_value, double t) {
  switch (family) {
    case DdfFamily::GammaRatio: return gamma_ddf(norm_value, t);
    case DdfFamily::SquaredRatio: return gamma_ddf(norm_value * norm_value, t);
  }
  throw_invalid("unknown DDF family");
}

double epsilon_a(double a, double x) {
  if (a < 0.0 || x < 0.0 || std::isnan(a) || std::isnan(x)) throw_domain("epsilon_a takes a >= 0, x >= 0");
  return x > a ? 1.0 : 0.0;
}

TabulatedDdf tabulate_step(double a, const UniformGrid& grid) {
  TabulatedDdf out{grid, std::vector<double>(grid.size)};
  for (std::size_t i = 0; i < grid.size; ++i) out.values[i] = epsilon_a(a, grid.at(i));
  return out;
}

TabulatedDdf tabulate_gamma(double norm_value, const UniformGrid& grid) {
  TabulatedDdf out{grid, std::vector<double>(grid.size)};
  for (std::size_t i = 0; i < grid.size; ++i) out.values[i] = gamma_ddf(norm_value, grid.at(i));
  return out;
}

TabulatedDdf sup_convolution(const TabulatedDdf& f, const TabulatedDdf& g, TNorm norm) {
  if (!(f.grid == g.grid)) throw_invalid("sup_convolution: operands tabulated on different grids");
  if (f.values.size() != f.grid.size || g.values.size() != g.grid.size)
    throw_invalid("sup_convolution: value count does not match grid size");
  if (!(f.grid.step > 0.0)) throw_invalid("sup_convolution: grid step must be positive");

  const std::size_t n = f.grid.size;
  TabulatedDdf out{f.grid, std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    double best = i == 0 ? tnorm_apply(norm, f.values[0], g.values[0]) : 0.0;
    // j + l == i + 1 with j, l in [1, n-1]
    const std::size_t j_lo = 1;
    const std::size_t j_hi = std::min(i, n - 1);
    for (std::size_t j = j_lo; j <= j_hi; ++j) {
      const std::size_t l = i + 1 - j;
      if (l >= n) continue;
      best = std::max(best, tnorm_apply(norm, f.values[j], g.values[l]));
    }
    out.values[i] = best;
  }
  return out;
}

AxiomReport check_random_norm_axioms(const Matrix& points, std::span<const double> t_grid,
                                     double tol, const AxiomCheckOptions& options) {
  if (points.rows() == 0) throw_invalid("axiom check needs at least one point");
  if (t_grid.empty()) throw_invalid("axiom check needs a non-empty t grid");
  if (!(tol >= 0.0)) throw_invalid("axiom check tolerance must be >= 0");
  for (double t : t_grid)
    if (!(t > 0.0) || !std::isfinite(t)) throw_domain("axiom check grid values must be positive");

  const std::size_t n = points.rows();
  const std::size_t d = points.cols();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = norm(points.row(i));

  AxiomReport report;
  report.worst_violation = -std::numeric_limits<double>::infinity();
  for (double& w : report.worst_by_axiom) w = -std::numeric_limits<double>::infinity();

  auto record = [&](const AxiomWitness& w) {
    ++report.checks;
    double& slot = report.worst_by_axiom[static_cast<int>(w.axiom)];
    slot = std::max(slot, w.violation);
    if (w.violation > report.worst_violation) {
      report.worst_violation = w.violation;
      report.witness = w;
    }
  };

  const auto ddf = [&](double r, double t) { return ddf_evaluate(options.family, r, t); };

  // Pairs for the triangle axiom.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (options.max_pairs == 0) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);
  } else {
    Rng rng(options.seed);
    pairs.reserve(options.max_pairs);
    for (std::size_t s = 0; s < options.max_pairs; ++s)
      pairs.emplace_back(rng.uniform_index(n), rng.uniform_index(n));
  }

  std::vector<double> sum(d);
  for (const auto& [i, j] : pairs) {
    for (std::size_t c = 0; c < d; ++c) sum[c] = points(i, c) + points(j, c);
    const double r_sum = norm(sum);
    for (double t : t_grid) {
      const double gp = ddf(norms[i], t);
      for (double tp : t_grid) {
        const double rhs = tnorm_apply(options.tnorm, gp, ddf(norms[j], tp));
        const double lhs = ddf(r_sum, t + tp);
        record({Axiom::Triangle, i, j, t, tp, rhs - lhs});
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (double alpha : options.alphas) {
      if (alpha == 0.0) continue;
      const double r_scaled = std::abs(alpha) * norms[i];
      for (double t : t_grid) {
        const double v = std::abs(ddf(r_scaled, t) - ddf(norms[i], t / std::abs(alpha)));
        record({Axiom::Scaling, i, i, t, alpha, v});
      }
    }

    // G_p is eps_0 on the grid iff every grid value maps to 1.
    const bool is_null = norms[i] == 0.0;
    double min_value = 1.0;
    double at_t = t_grid.front();
    for (double t : t_grid) {
      const double v = ddf(norms[i], t);
      if (v < min_value) {
        min_value = v;
        at_t = t;
      }
    }
    const bool looks_like_eps0 = min_value == 1.0;
    // Violation is 1 when the equivalence breaks, otherwise the margin is 0.
    const double v = (is_null == looks_like_eps0) ? 0.0 : 1.0;
    record({Axiom::NullVector, i, i, at_t, 0.0, v});
  }

  report.passed = report.worst_violation <= tol;
  return report;
}

}  // namespace rnkm::pm
