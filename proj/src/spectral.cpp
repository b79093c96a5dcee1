#include "rnkm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rnkm/error.hpp"
#include "rnkm/pmspace.hpp"

namespace rnkm::spectral {

SimilarityMatrix pairwise_similarity(const Matrix& x, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw_domain("similarity requires t > 0");
  if (x.rows() < 2) throw_invalid("similarity requires at least two points");
  if (!x.all_finite()) throw_domain("similarity input contains non-finite values");

  const std::size_t n = x.rows();
  SimilarityMatrix out{Matrix(n, n), t};
  for (std::size_t i = 0; i < n; ++i) {
    out.weights(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = pm::gamma_ddf(distance(x.row(i), x.row(j)), t);
      out.weights(i, j) = w;
      out.weights(j, i) = w;
    }
  }
  return out;
}

Matrix normalized_laplacian(const Matrix& w) {
  const std::size_t n = w.rows();
  if (n == 0 || w.cols() != n) throw_invalid("laplacian needs a non-empty square matrix");

  std::vector<double> inv_sqrt_degree(n);
  for (std::size_t i = 0; i < n; ++i) {
    double degree = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (w(i, j) < 0.0) throw_domain("laplacian needs non-negative weights");
      degree += w(i, j);
    }
    if (!(degree > 0.0)) throw_domain("laplacian: row " + std::to_string(i) + " has zero degree");
    inv_sqrt_degree[i] = 1.0 / std::sqrt(degree);
  }

  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      // Mean of the two triangles keeps L exactly symmetric for any input.
      const double wij = i == j ? w(i, i) : 0.5 * (w(i, j) + w(j, i));
      const double v = (i == j ? 1.0 : 0.0) - wij * inv_sqrt_degree[i] * inv_sqrt_degree[j];
      l(i, j) = v;
      l(j, i) = v;
    }
  }
  return l;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return std::sqrt(s);
}

void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const std::size_t n = a.rows();

  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  for (std::size_t k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  double* row_p = a.row(p).data();
  double* row_q = a.row(q).data();
  for (std::size_t k = 0; k < n; ++k) {
    const double apk = row_p[k];
    const double aqk = row_q[k];
    row_p[k] = c * apk - s * aqk;
    row_q[k] = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

EigenPairs sym_eigendecomp(const Matrix& input, const JacobiOptions& options) {
  const std::size_t n = input.rows();
  if (n == 0 || input.cols() != n) throw_invalid("eigendecomposition needs a non-empty square matrix");
  if (!input.all_finite()) throw_domain("eigendecomposition input contains non-finite values");

  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (std::abs(input(i, j) - input(j, i)) > options.symmetry_tolerance) {
        std::ostringstream msg;
        msg << "matrix is not symmetric at (" << i << "," << j << ")";
        throw_invalid(msg.str());
      }
      const double v = 0.5 * (input(i, j) + input(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
  }

  Matrix v = Matrix::identity(n);
  const double threshold = options.relative_tolerance * frobenius_norm(a);
  int sweep = 0;
  double off = off_diagonal_norm(a);
  while (off > threshold) {
    if (sweep == options.max_sweeps) {
      std::ostringstream msg;
      msg << "Jacobi did not converge in " << options.max_sweeps
          << " sweeps; off-diagonal norm " << off;
      throw Error(ErrorCode::Numeric, msg.str());
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    ++sweep;
    off = off_diagonal_norm(a);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

  EigenPairs out{std::vector<double>(n), Matrix(n, n), sweep};
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.values[j] = a(src, src);
    std::size_t lead = 0;
    for (std::size_t k = 1; k < n; ++k)
      if (std::abs(v(k, src)) > std::abs(v(lead, src))) lead = k;
    const double sign = v(lead, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = sign * v(k, src);
  }
  return out;
}

Embedding embedding_from_eigenpairs(const EigenPairs& eig, std::size_t k) {
  const std::size_t n = eig.vectors.rows();
  if (k == 0) throw_invalid("embedding dimension must be >= 1");
  if (k > n) throw_invalid("embedding dimension k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));

  Embedding out{Matrix(n, k), {}};
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.rows.row(i);
    for (std::size_t j = 0; j < k; ++j) row[j] = eig.vectors(i, j);
    const double r = norm(row);
    if (r == 0.0) {
      out.zero_rows.push_back(i);
      continue;
    }
    for (double& x : row) x /= r;
  }
  return out;
}

Embedding spectral_embedding(const Matrix& laplacian, std::size_t k) {
  if (k > laplacian.rows()) {
    throw_invalid("embedding dimension k=" + std::to_string(k) + " exceeds n=" +
                  std::to_string(laplacian.rows()));
  }
  return embedding_from_eigenpairs(sym_eigendecomp(laplacian), k);
}

}  // namespace rnkm::spectral
