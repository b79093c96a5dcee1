#pragma once

#include <cstddef>
#include <vector>

#include "rnkm/matrix.hpp"

namespace rnkm::spectral {

/// Dense Gamma-similarity matrix W_ij = t / (t + |x_i - x_j|).
struct SimilarityMatrix {
  Matrix weights;
  double t = 0.0;
};

struct EigenPairs {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j pairs with values[j]
  int sweeps = 0;
};

struct JacobiOptions {
  double relative_tolerance = 1e-10;  // on off-diagonal Frobenius norm / |A|_F
  int max_sweeps = 100;
  double symmetry_tolerance = 1e-10;
};

/// Row-normalized spectral embedding. Rows whose norm is exactly zero
/// before normalization are left at zero and listed in `zero_rows`.
struct Embedding {
  Matrix rows;
  std::vector<std::size_t> zero_rows;
};

SimilarityMatrix pairwise_similarity(const Matrix& x, double t);

/// I - D^{-1/2} W D^{-1/2}, symmetric by construction.
Matrix normalized_laplacian(const Matrix& w);

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenvalues come
/// back ascending; each eigenvector is signed so that its largest-magnitude
/// component (lowest index on ties) is positive.
EigenPairs sym_eigendecomp(const Matrix& a, const JacobiOptions& options = {});

/// The k eigenvectors of smallest eigenvalue, rows normalized to unit length.
Embedding spectral_embedding(const Matrix& laplacian, std::size_t k);
Embedding embedding_from_eigenpairs(const EigenPairs& eig, std::size_t k);

}  // namespace rnkm::spectral
