#pragma once

#include <Eigen/Dense>

#include "lrsdp/errors.hpp"

namespace lrsdp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense symmetric eigendecomposition with eigenvalues sorted descending and
// columns of `vectors` ordered to match.
struct EigenDecomposition {
  Matrix vectors;
  Vector values;
};

// Length of svec(X) for a symmetric matrix of order n.
inline Eigen::Index svec_length(Eigen::Index n) { return n * (n + 1) / 2; }

// Order of the symmetric matrix behind an svec of length len, or -1 if len is
// not a triangular number.
Eigen::Index svec_order(Eigen::Index len);

// Isometric vectorization: column-major lower triangle, off-diagonal entries
// scaled by sqrt(2), so that <svec(X), svec(S)> = tr(XS). Only the lower
// triangle of X is read.
Vector svec(const Matrix& X);

// Inverse of svec; the result is exactly symmetric.
Matrix smat(const Vector& v);

// Symmetrized Kronecker-product apply: for A, B of identical shape n x r and
// x = svec of an order-r symmetric matrix, returns
// svec((A smat(x) B' + B smat(x) A') / 2).
Vector skron_apply(const Matrix& A, const Matrix& B, const Vector& x);

// Eigendecomposition of a symmetric matrix, eigenvalues descending.
EigenDecomposition eig_sym(const Matrix& X);

// 0.5 * (M + M'); used wherever a product is symmetric in exact arithmetic.
inline Matrix symmetrize(const Matrix& M) { return 0.5 * (M + M.transpose()); }

// Spectral norm of a symmetric matrix.
double spectral_norm(const Matrix& X);

}  // namespace lrsdp
