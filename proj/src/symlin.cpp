#include "lrsdp/symlin.hpp"

#include <cmath>

namespace lrsdp {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

Eigen::Index svec_order(Eigen::Index len) {
  const auto n = static_cast<Eigen::Index>((std::sqrt(8.0 * static_cast<double>(len) + 1.0) - 1.0) / 2.0 + 0.5);
  return svec_length(n) == len ? n : -1;
}

Vector svec(const Matrix& X) {
  const Eigen::Index n = X.rows();
  Vector v(svec_length(n));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    v[k++] = X(j, j);
    for (Eigen::Index i = j + 1; i < n; ++i) v[k++] = kSqrt2 * X(i, j);
  }
  return v;
}

Matrix smat(const Vector& v) {
  const Eigen::Index n = svec_order(v.size());
  if (n < 0) throw InvalidDimension("smat: length " + std::to_string(v.size()) + " is not triangular");
  Matrix X(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    X(j, j) = v[k++];
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double a = v[k++] / kSqrt2;
      X(i, j) = a;
      X(j, i) = a;
    }
  }
  return X;
}

Vector skron_apply(const Matrix& A, const Matrix& B, const Vector& x) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw InvalidDimension("skron_apply: A and B shapes differ");
  const Matrix X = smat(x);
  if (X.rows() != A.cols())
    throw InvalidDimension("skron_apply: svec order does not match column count");
  // B X A' = (A X B')' for symmetric X, so one product suffices
  const Matrix M = A * X * B.transpose();
  return svec(Matrix(0.5 * (M + M.transpose())));
}

double spectral_norm(const Matrix& X) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(X), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

EigenDecomposition eig_sym(const Matrix& X) {
  if (!X.allFinite()) throw NumericalFailure("eig_sym: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(X));
  if (es.info() != Eigen::Success) throw NumericalFailure("eig_sym: solver failed");
  // Eigen returns ascending order; flip to descending.
  const Eigen::Index n = X.rows();
  EigenDecomposition dec;
  dec.values = es.eigenvalues().reverse();
  dec.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) dec.vectors.col(j) = es.eigenvectors().col(n - 1 - j);
  return dec;
}

}  // namespace lrsdp
