#pragma once

// Dense oracles built straight from the definitions (basis matrix Psi_n and
// explicit Kronecker products). Test-only: everything here is O(n^4) or worse
// and independent of the matrix-free implementation paths it checks.

#include <lrsdp/decomp.hpp>
#include <lrsdp/rng.hpp>

namespace oracle {

using lrsdp::Matrix;
using lrsdp::Vector;

// Psi_n: the n^2 x n(n+1)/2 orthonormal basis of vec(S^n), with
// Psi' vec(X) = svec(X).
inline Matrix psi(Eigen::Index n) {
  Matrix P = Matrix::Zero(n * n, lrsdp::svec_length(n));
  Eigen::Index k = 0;
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    P(j * n + j, k++) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      P(j * n + i, k) = s;
      P(i * n + j, k) = s;
      ++k;
    }
  }
  return P;
}

inline Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

// A (x)_s B = 0.5 Psi_n' (A (x) B + B (x) A) Psi_r  for A, B n x r.
inline Matrix skron(const Matrix& A, const Matrix& B) {
  return 0.5 * psi(A.rows()).transpose() * (kron(A, B) + kron(B, A)) * psi(A.cols());
}

// Dense W (x)_s W over svec coordinates.
inline Matrix scaling_matrix(const Matrix& W) { return skron(W, W); }

// Dense Q_op = [Q (x)_s Q, sqrt(2) Psi'(Q (x) Qperp)] from the definition.
inline Matrix q_matrix(const Matrix& Q, const Matrix& Qperp) {
  const Eigen::Index n = Q.rows();
  Matrix out(lrsdp::svec_length(n), Q.cols() * (Q.cols() + 1) / 2 + Q.cols() * Qperp.cols());
  out.leftCols(Q.cols() * (Q.cols() + 1) / 2) = skron(Q, Q);
  out.rightCols(Q.cols() * Qperp.cols()) =
      std::sqrt(2.0) * psi(n).transpose() * kron(Q, Qperp);
  return out;
}

// Dense matrix of any vector->vector map, one basis vector at a time.
template <typename F>
Matrix densify(Eigen::Index rows, Eigen::Index cols, F&& apply) {
  Matrix M(rows, cols);
  Vector e = Vector::Zero(cols);
  for (Eigen::Index k = 0; k < cols; ++k) {
    e[k] = 1.0;
    M.col(k) = apply(e);
    e[k] = 0.0;
  }
  return M;
}

inline Matrix random_symmetric(lrsdp::Rng& rng, Eigen::Index n) {
  Matrix X(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i <= j; ++i) X(i, j) = X(j, i) = rng.normal();
  return X;
}

// SPD with eigenvalues uniform in [lo, hi].
inline Matrix random_spd(lrsdp::Rng& rng, Eigen::Index n, double lo = 0.5, double hi = 2.0) {
  const lrsdp::EigenDecomposition ed = lrsdp::eig_sym(random_symmetric(rng, n));
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = lo + (hi - lo) * rng.uniform();
  return lrsdp::symmetrize(ed.vectors * d.asDiagonal() * ed.vectors.transpose());
}

inline Vector random_vector(lrsdp::Rng& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

// NtScaling assembled from a given PSD scaling matrix (and optional LP part),
// bypassing the X/S pair.
inline lrsdp::NtScaling scaling_from_w(const Matrix& W, const Vector& w_lp = Vector()) {
  lrsdp::NtScaling s;
  s.w_lp = w_lp;
  s.W_psd = W;
  s.eig_W = lrsdp::eig_sym(W);
  return s;
}

}  // namespace oracle
