#include <cmath>
#include <numbers>

#include "rnkm/data.hpp"
#include "rnkm/error.hpp"

namespace rnkm::data {
namespace {

struct DistInfo {
  Distribution dist;
  const char* name;
};

constexpr DistInfo kNames[] = {
    {Distribution::UniformReal, "uniform_real"}, {Distribution::UniformInt, "uniform_int"},
    {Distribution::Normal, "normal"},            {Distribution::Exponential, "exponential"},
    {Distribution::UniformDiscrete, "uniform_discrete"}, {Distribution::Binomial, "binomial"},
    {Distribution::Gamma, "gamma"},              {Distribution::Lognormal, "lognormal"},
    {Distribution::Poisson, "poisson"},          {Distribution::Bernoulli, "bernoulli"},
};

double param(const std::map<std::string, double>& p, const char* key) {
  const auto it = p.find(key);
  if (it == p.end()) throw_invalid(std::string("missing distribution parameter '") + key + "'");
  return it->second;
}

std::map<std::string, double> merged(Distribution dist, const std::map<std::string, double>& given) {
  auto p = default_params(dist);
  for (const auto& [key, value] : given) {
    if (!p.count(key)) throw_invalid("parameter '" + key + "' does not apply to " + to_string(dist));
    p[key] = value;
  }
  return p;
}

void validate_params(Distribution dist, const std::map<std::string, double>& p) {
  for (const auto& [key, value] : p)
    if (!std::isfinite(value)) throw_domain("parameter '" + key + "' must be finite");
  auto positive = [&](const char* key) {
    if (!(param(p, key) > 0.0)) throw_domain(to_string(dist) + ": " + key + " must be > 0");
  };
  auto probability = [&](const char* key) {
    const double v = param(p, key);
    if (!(v >= 0.0 && v <= 1.0)) throw_domain(to_string(dist) + ": " + key + " must lie in [0,1]");
  };
  auto integral = [&](const char* key) {
    const double v = param(p, key);
    if (v != std::floor(v)) throw_domain(to_string(dist) + ": " + key + " must be an integer");
  };
  switch (dist) {
    case Distribution::UniformReal:
      if (!(param(p, "low") < param(p, "high"))) throw_domain("uniform_real: need low < high");
      break;
    case Distribution::UniformInt:
    case Distribution::UniformDiscrete:
      integral("low");
      integral("high");
      if (!(param(p, "low") <= param(p, "high"))) throw_domain(to_string(dist) + ": need low <= high");
      break;
    case Distribution::Normal:
    case Distribution::Lognormal: positive("sd"); break;
    case Distribution::Exponential: positive("lambda"); break;
    case Distribution::Binomial:
      integral("trials");
      if (param(p, "trials") < 0.0) throw_domain("binomial: trials must be >= 0");
      probability("p");
      break;
    case Distribution::Gamma:
      positive("shape");
      positive("scale");
      break;
    case Distribution::Poisson:
      positive("lambda");
      // Knuth's method underflows exp(-lambda) beyond this.
      if (param(p, "lambda") > 700.0) throw_domain("poisson: lambda must be <= 700");
      break;
    case Distribution::Bernoulli: probability("p"); break;
  }
}

}  // namespace

std::string to_string(Distribution dist) {
  for (const auto& info : kNames)
    if (info.dist == dist) return info.name;
  return "unknown";
}

Distribution distribution_from_string(const std::string& name) {
  for (const auto& info : kNames)
    if (name == info.name) return info.dist;
  // Short aliases used on the command line.
  if (name == "random" || name == "uniform") return Distribution::UniformReal;
  if (name == "integer") return Distribution::UniformInt;
  if (name == "discrete") return Distribution::UniformDiscrete;
  throw_invalid("unknown distribution '" + name + "'");
}

const std::vector<Distribution>& all_distributions() {
  static const std::vector<Distribution> all = [] {
    std::vector<Distribution> v;
    for (const auto& info : kNames) v.push_back(info.dist);
    return v;
  }();
  return all;
}

std::map<std::string, double> default_params(Distribution dist) {
  switch (dist) {
    case Distribution::UniformReal: return {{"low", 0.0}, {"high", 100.0}};
    case Distribution::UniformInt: return {{"low", 0.0}, {"high", 100.0}};
    case Distribution::Normal: return {{"mean", 0.0}, {"sd", 1.0}};
    case Distribution::Exponential: return {{"lambda", 0.5}};
    case Distribution::UniformDiscrete: return {{"low", 0.0}, {"high", 9.0}};
    case Distribution::Binomial: return {{"trials", 10.0}, {"p", 0.5}};
    case Distribution::Gamma: return {{"shape", 1.0}, {"scale", 2.0}};
    case Distribution::Lognormal: return {{"mean", 0.0}, {"sd", 1.0}};
    case Distribution::Poisson: return {{"lambda", 2.0}};
    case Distribution::Bernoulli: return {{"p", 0.3}};
  }
  return {};
}

SyntheticPreset benchmark_preset(Distribution dist, std::uint64_t seed) {
  struct Row {
    std::size_t n, clusters, d;
  };
  Row row{};
  switch (dist) {
    case Distribution::UniformReal: row = {10000, 3, 20}; break;
    case Distribution::UniformInt: row = {100, 3, 10}; break;
    case Distribution::Normal: row = {1000, 3, 20}; break;
    case Distribution::Exponential: row = {5000, 5, 40}; break;
    case Distribution::UniformDiscrete: row = {10000, 7, 50}; break;
    case Distribution::Binomial: row = {50000, 7, 70}; break;
    case Distribution::Gamma: row = {100000, 7, 100}; break;
    case Distribution::Lognormal: row = {70000, 10, 90}; break;
    case Distribution::Poisson: row = {80000, 10, 100}; break;
    case Distribution::Bernoulli: row = {90000, 7, 10}; break;
  }
  return {SyntheticSpec{dist, default_params(dist), row.n, row.d, seed}, static_cast<int>(row.clusters)};
}

Sampler::Sampler(Distribution dist, std::map<std::string, double> params, std::uint64_t seed)
    : dist_(dist), params_(merged(dist, params)), rng_(seed) {
  validate_params(dist_, params_);
}

double Sampler::normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  const double u1 = rng_.uniform_open_low();
  const double u2 = rng_.uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  return r * std::cos(theta);
}

double Sampler::gamma(double shape) {
  if (shape < 1.0) {
    // Boost: Gamma(a) = Gamma(a + 1) * U^{1/a}.
    const double g = gamma(shape + 1.0);
    return g * std::pow(rng_.uniform_open_low(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z = 0.0;
    double v = 0.0;
    do {
      z = normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng_.uniform_open_low();
    if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
    if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Sampler::operator()() {
  const auto& p = params_;
  switch (dist_) {
    case Distribution::UniformReal: {
      const double lo = p.at("low"), hi = p.at("high");
      return lo + (hi - lo) * rng_.uniform();
    }
    case Distribution::UniformInt:
    case Distribution::UniformDiscrete: {
      const double lo = p.at("low"), hi = p.at("high");
      const auto span = static_cast<std::size_t>(hi - lo) + 1;
      return lo + static_cast<double>(rng_.uniform_index(span));
    }
    case Distribution::Normal: return p.at("mean") + p.at("sd") * normal();
    case Distribution::Exponential: return -std::log(rng_.uniform_open_low()) / p.at("lambda");
    case Distribution::Binomial: {
      const auto trials = static_cast<long>(p.at("trials"));
      const double prob = p.at("p");
      long hits = 0;
      for (long i = 0; i < trials; ++i) hits += rng_.uniform() < prob ? 1 : 0;
      return static_cast<double>(hits);
    }
    case Distribution::Gamma: return p.at("scale") * gamma(p.at("shape"));
    case Distribution::Lognormal: return std::exp(p.at("mean") + p.at("sd") * normal());
    case Distribution::Poisson: {
      const double limit = std::exp(-p.at("lambda"));
      long k = 0;
      double prod = rng_.uniform();
      while (prod > limit) {
        ++k;
        prod *= rng_.uniform();
      }
      return static_cast<double>(k);
    }
    case Distribution::Bernoulli: return rng_.uniform() < p.at("p") ? 1.0 : 0.0;
  }
  throw_invalid("unknown distribution");
}

Matrix gen_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.d < 1) throw_domain("synthetic data needs n >= 1 and d >= 1");
  Sampler sample(spec.distribution, spec.params, spec.seed);
  Matrix out(spec.n, spec.d);
  double* v = out.data();
  for (std::size_t i = 0; i < spec.n * spec.d; ++i) v[i] = sample();
  return out;
}

Moments analytic_moments(Distribution dist, const std::map<std::string, double>& given) {
  const auto p = merged(dist, given);
  switch (dist) {
    case Distribution::UniformReal: {
      const double w = p.at("high") - p.at("low");
      return {0.5 * (p.at("low") + p.at("high")), w * w / 12.0};
    }
    case Distribution::UniformInt:
    case Distribution::UniformDiscrete: {
      const double m = p.at("high") - p.at("low") + 1.0;
      return {0.5 * (p.at("low") + p.at("high")), (m * m - 1.0) / 12.0};
    }
    case Distribution::Normal: return {p.at("mean"), p.at("sd") * p.at("sd")};
    case Distribution::Exponential: {
      const double l = p.at("lambda");
      return {1.0 / l, 1.0 / (l * l)};
    }
    case Distribution::Binomial: {
      const double n = p.at("trials"), q = p.at("p");
      return {n * q, n * q * (1.0 - q)};
    }
    case Distribution::Gamma: {
      const double k = p.at("shape"), s = p.at("scale");
      return {k * s, k * s * s};
    }
    case Distribution::Lognormal: {
      const double mu = p.at("mean"), s2 = p.at("sd") * p.at("sd");
      return {std::exp(mu + 0.5 * s2), (std::exp(s2) - 1.0) * std::exp(2.0 * mu + s2)};
    }
    case Distribution::Poisson: return {p.at("lambda"), p.at("lambda")};
    case Distribution::Bernoulli: return {p.at("p"), p.at("p") * (1.0 - p.at("p"))};
  }
  return {};
}

}  // namespace rnkm::data
