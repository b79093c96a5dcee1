#pragma once

// Probabilistic-metric primitives: distance distribution functions,
// t-norms, the sup-convolution triangle function, and a randomized
// verifier for the random-normed-space axioms.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rnkm/matrix.hpp"

namespace rnkm::pm {

enum class TNorm { Min, Product, Lukasiewicz };

/// Parametric family evaluated as (norm value, t) -> [0,1].
/// `SquaredRatio` (t / (t + r^2)) is not a random norm; it exists so the
/// axiom checker has a known-bad family to reject.
enum class DdfFamily { GammaRatio, SquaredRatio };

std::string to_string(TNorm norm);
TNorm tnorm_from_string(const std::string& name);

double tnorm_apply(TNorm norm, double x, double y);

/// t / (t + r) for t > 0, and 0 at t = 0.
double gamma_ddf(double norm_value, double t);

double ddf_evaluate(DdfFamily family, double norm_value, double t);

/// Unit step at `a`: 0 on [0, a], 1 beyond.
double epsilon_a(double a, double x);

/// Uniform grid t_i = i * step, i = 0 .. size-1.
struct UniformGrid {
  double step = 1.0;
  std::size_t size = 0;

  double at(std::size_t i) const noexcept { return static_cast<double>(i) * step; }
  bool operator==(const UniformGrid&) const = default;
};

/// A distance distribution function sampled on a uniform grid.
struct TabulatedDdf {
  UniformGrid grid;
  std::vector<double> values;
};

TabulatedDdf tabulate_step(double a, const UniformGrid& grid);
TabulatedDdf tabulate_gamma(double norm_value, const UniformGrid& grid);

/// sup { H(f(s), g(u)) : s + u = t } on the grid.
///
/// Samples are read as a left-continuous staircase, f(s) = f(t_j) for
/// s in (t_{j-1}, t_j]. For a grid point t_i the attainable pairs of
/// staircase cells are (j, l) with j + l = i + 1, plus the corner s = u = 0.
/// Under this reading the step functions compose exactly:
/// eps_a * eps_b = eps_{a+b} whenever a and b are grid points.
TabulatedDdf sup_convolution(const TabulatedDdf& f, const TabulatedDdf& g, TNorm norm);

enum class Axiom { Triangle, Scaling, NullVector };

std::string to_string(Axiom axiom);

struct AxiomWitness {
  Axiom axiom = Axiom::Triangle;
  std::size_t p = 0;       // row index into the point set
  std::size_t q = 0;       // second row (triangle axiom), else == p
  double t = 0.0;
  double t_prime = 0.0;    // second grid value (triangle) or the scale alpha
  double violation = 0.0;  // signed; positive means the axiom is broken
};

struct AxiomReport {
  bool passed = true;
  double worst_violation = 0.0;  // max signed violation over all checks
  std::optional<AxiomWitness> witness;  // location of worst_violation
  std::size_t checks = 0;
  // Per-axiom worst violation, in Axiom enum order.
  double worst_by_axiom[3] = {0.0, 0.0, 0.0};
};

struct AxiomCheckOptions {
  DdfFamily family = DdfFamily::GammaRatio;
  TNorm tnorm = TNorm::Product;
  std::vector<double> alphas = {-3.0, -1.0, -0.5, 0.25, 2.0, 7.5};
  /// 0 checks every unordered pair (i <= j); otherwise this many pairs are
  /// drawn with the seeded generator.
  std::size_t max_pairs = 0;
  std::uint64_t seed = 0;
};

/// Checks, over the sampled pairs and grid:
///  triangle  G_{p+q}(t+t') >= H(G_p(t), G_q(t')),
///  scaling   G_{a p}(t) == G_p(t/|a|),
///  null      G_p == eps_0 iff p == 0 (evaluated on the grid).
/// Every check contributes a signed violation; the report keeps the worst.
AxiomReport check_random_norm_axioms(const Matrix& points, std::span<const double> t_grid,
                                     double tol, const AxiomCheckOptions& options = {});

}  // namespace rnkm::pm
