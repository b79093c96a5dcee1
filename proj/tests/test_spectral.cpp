#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "rnkm/error.hpp"
#include "rnkm/pmspace.hpp"
#include "rnkm/spectral.hpp"
#include "test_support.hpp"

using namespace rnkm;
using namespace rnkm::spectral;

namespace {

Matrix random_points(std::mt19937_64& gen, std::size_t n, std::size_t d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix x(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) = u(gen);
  return x;
}

Matrix random_symmetric(std::mt19937_64& gen, std::size_t n) {
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(gen);
  return a;
}

double max_residual(const Matrix& a, const EigenPairs& e) {
  const std::size_t n = a.rows();
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double av = 0.0;
      for (std::size_t j = 0; j < n; ++j) av += a(i, j) * e.vectors(j, k);
      r2 += (av - e.values[k] * e.vectors(i, k)) * (av - e.values[k] * e.vectors(i, k));
    }
    worst = std::max(worst, std::sqrt(r2) / std::max(1.0, std::abs(e.values[k])));
  }
  return worst;
}

double orthonormality_error(const Matrix& v) {
  double worst = 0.0;
  for (std::size_t a = 0; a < v.cols(); ++a)
    for (std::size_t b = 0; b < v.cols(); ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < v.rows(); ++i) dot += v(i, a) * v(i, b);
      worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

}  // namespace

TEST_CASE("similarity matrix entries") {
  const Matrix x = testutil::column({0.0, 1.0, 1.0, 4.0});
  const auto w = pairwise_similarity(x, 1.0);
  CHECK(w.t == 1.0);
  CHECK(w.weights(0, 1) == 0.5);
  CHECK(w.weights(1, 2) == 1.0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(w.weights(i, i) == 1.0);
  CHECK(w.weights == w.weights.transposed());
  CHECK_THROWS_AS(pairwise_similarity(x, 0.0), Error);
  CHECK_THROWS_AS(pairwise_similarity(x, -1.0), Error);
  CHECK_THROWS_AS(pairwise_similarity(testutil::column({1.0}), 1.0), Error);
}

TEST_CASE("similarity equals gamma bit for bit") {
  std::mt19937_64 gen(2);
  const Matrix x = random_points(gen, 25, 3);
  const auto w = pairwise_similarity(x, 0.7);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.rows(); ++j)
      CHECK(w.weights(i, j) == pm::gamma_ddf(distance(x.row(i), x.row(j)), 0.7));
}

TEST_CASE("normalized laplacian hand cases") {
  const Matrix l0 = normalized_laplacian(Matrix::identity(2));
  for (double v : l0.values()) CHECK(v == 0.0);

  const Matrix ones(2, 2, 1.0);
  const Matrix l = normalized_laplacian(ones);
  CHECK(l(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(l(0, 1) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(l(1, 0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(l(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
  const auto e = sym_eigendecomp(l);
  CHECK(std::abs(e.values[0]) < 1e-14);
  CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-14));

  Matrix bad(2, 2);
  bad(0, 0) = 0.0;
  bad(1, 1) = 1.0;
  CHECK_THROWS_AS(normalized_laplacian(bad), Error);
}

TEST_CASE("laplacian symmetry and sqrt-degree null vector") {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = random_points(gen, 30, 2);
    const auto w = pairwise_similarity(x, 0.3);
    const Matrix l = normalized_laplacian(w.weights);
    for (std::size_t i = 0; i < 30; ++i)
      for (std::size_t j = 0; j < 30; ++j) CHECK(l(i, j) == l(j, i));
    std::vector<double> s(30);
    for (std::size_t i = 0; i < 30; ++i) {
      double deg = 0.0;
      for (std::size_t j = 0; j < 30; ++j) deg += w.weights(i, j);
      s[i] = std::sqrt(deg);
    }
    for (std::size_t i = 0; i < 30; ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j < 30; ++j) v += l(i, j) * s[j];
      CHECK(std::abs(v) < 1e-12);
    }
  }
}

TEST_CASE("eigendecomposition small cases") {
  Matrix d(3, 3);
  d(0, 0) = 3;
  d(1, 1) = 1;
  d(2, 2) = 2;
  const auto e = sym_eigendecomp(d);
  CHECK(e.values == std::vector<double>{1, 2, 3});
  for (std::size_t k = 0; k < 3; ++k) {
    int nonzero = 0;
    for (std::size_t i = 0; i < 3; ++i)
      if (e.vectors(i, k) != 0.0) {
        ++nonzero;
        CHECK(std::abs(e.vectors(i, k)) == 1.0);
      }
    CHECK(nonzero == 1);
  }
  CHECK(e.vectors(1, 0) == 1.0);
  CHECK(e.vectors(2, 1) == 1.0);
  CHECK(e.vectors(0, 2) == 1.0);

  Matrix swap(2, 2);
  swap(0, 1) = swap(1, 0) = 1.0;
  const auto s = sym_eigendecomp(swap);
  CHECK(s.values[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(s.values[1] == doctest::Approx(1.0).epsilon(1e-14));

  const Matrix one(1, 1, 4.0);
  CHECK(sym_eigendecomp(one).values == std::vector<double>{4.0});

  Matrix asym(2, 2);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(sym_eigendecomp(asym), Error);
}

TEST_CASE("non-convergence reports the off-diagonal norm") {
  std::mt19937_64 gen(4);
  const Matrix a = random_symmetric(gen, 12);
  JacobiOptions opts;
  opts.max_sweeps = 1;
  try {
    sym_eigendecomp(a, opts);
    FAIL("expected a convergence error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Numeric);
    CHECK(std::string(e.what()).find("off-diagonal") != std::string::npos);
  }
}

TEST_CASE("eigendecomposition matches an independent solver") {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + gen() % 25;
    const Matrix a = random_symmetric(gen, n);
    const auto e = sym_eigendecomp(a);
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = a(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(m);
    double trace = 0.0, sum = 0.0, fro = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(e.values[i] == doctest::Approx(ref.eigenvalues()(i)).epsilon(1e-9));
      trace += a(i, i);
      sum += e.values[i];
      if (i > 0) CHECK(e.values[i] >= e.values[i - 1]);
    }
    for (double v : a.values()) fro += v * v;
    CHECK(std::abs(sum - trace) <= 1e-8 * std::sqrt(fro));
    CHECK(max_residual(a, e) < 1e-8);
    CHECK(orthonormality_error(e.vectors) < 1e-8);
  }
}

TEST_CASE("eigendecomposition is deterministic and sign-normalized") {
  std::mt19937_64 gen(23);
  const Matrix a = random_symmetric(gen, 15);
  const auto e1 = sym_eigendecomp(a);
  const auto e2 = sym_eigendecomp(a);
  CHECK(e1.values == e2.values);
  CHECK(e1.vectors == e2.vectors);
  for (std::size_t k = 0; k < 15; ++k) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < 15; ++i)
      if (std::abs(e1.vectors(i, k)) > std::abs(e1.vectors(arg, k))) arg = i;
    CHECK(e1.vectors(arg, k) > 0.0);
  }
}

TEST_CASE("laplacian spectrum lies in [0, 2]") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = random_points(gen, 20 + trial, 3);
    const auto e = sym_eigendecomp(normalized_laplacian(pairwise_similarity(x, 0.05 + trial).weights));
    CHECK(e.values.front() >= -1e-8);
    CHECK(std::abs(e.values.front()) < 1e-8);
    CHECK(e.values.back() <= 2.0 + 1e-8);
  }
}

TEST_CASE("embedding rows have unit norm") {
  std::mt19937_64 gen(41);
  const Matrix x = random_points(gen, 40, 2);
  const Matrix l = normalized_laplacian(pairwise_similarity(x, 0.5).weights);
  const auto emb = spectral_embedding(l, 3);
  CHECK(emb.rows.rows() == 40);
  CHECK(emb.rows.cols() == 3);
  CHECK(emb.zero_rows.empty());
  for (std::size_t i = 0; i < 40; ++i) CHECK(std::abs(norm(emb.rows.row(i)) - 1.0) < 1e-12);
  const auto again = spectral_embedding(l, 3);
  CHECK(again.rows == emb.rows);
  CHECK_THROWS_AS(spectral_embedding(l, 41), Error);
  CHECK_THROWS_AS(spectral_embedding(l, 0), Error);
}

TEST_CASE("embedding of a zero laplacian") {
  const Matrix zero(4, 4);
  const auto emb = spectral_embedding(zero, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const double nr = norm(emb.rows.row(i));
    const bool flagged = std::find(emb.zero_rows.begin(), emb.zero_rows.end(), i) != emb.zero_rows.end();
    CHECK((flagged ? nr == 0.0 : std::abs(nr - 1.0) < 1e-12));
  }
}

TEST_CASE("embedding separates disconnected blocks") {
  // Two all-ones blocks of two points each.
  Matrix w(4, 4);
  w(0, 0) = w(0, 1) = w(1, 0) = w(1, 1) = 1.0;
  w(2, 2) = w(2, 3) = w(3, 2) = w(3, 3) = 1.0;
  const auto emb = spectral_embedding(normalized_laplacian(w), 2);
  auto same = [&](std::size_t a, std::size_t b) { return distance(emb.rows.row(a), emb.rows.row(b)) < 1e-9; };
  CHECK(same(0, 1));
  CHECK(same(2, 3));
  CHECK_FALSE(same(0, 2));
  // Exactly two distinct rows.
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < 4; ++i) {
    bool seen = false;
    for (std::size_t r : reps) seen = seen || same(i, r);
    if (!seen) reps.push_back(i);
  }
  CHECK(reps.size() == 2);
}
