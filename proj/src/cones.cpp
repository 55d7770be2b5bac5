#include "lrsdp/cones.hpp"

#include <cmath>

namespace lrsdp {

double ConePoint::min_eig() const {
  double m = std::numeric_limits<double>::infinity();
  if (lp.size() > 0) m = lp.minCoeff();
  if (psd.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(psd), Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues().minCoeff());
  }
  return m;
}

Matrix psd_power(const EigenDecomposition& dec, double exponent) {
  Vector d(dec.values.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = std::pow(dec.values[i], exponent);
  return dec.vectors * d.asDiagonal() * dec.vectors.transpose();
}

Matrix congruence_power(const EigenDecomposition& dec, const Matrix& M, double exponent) {
  const Eigen::Index n = dec.values.size();
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = std::pow(dec.values[i], exponent);
  Matrix Mh = dec.vectors.transpose() * M * dec.vectors;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) Mh(i, j) *= d[i] * d[j];
  return symmetrize(dec.vectors * Mh * dec.vectors.transpose());
}

NtScaling nt_scaling(const ConePoint& X, const ConePoint& S) {
  if (X.lp.size() != S.lp.size() || X.psd.rows() != S.psd.rows())
    throw InvalidDimension("nt_scaling: layouts differ");

  NtScaling w;
  w.w_lp.resize(X.lp.size());
  for (Eigen::Index i = 0; i < X.lp.size(); ++i) {
    if (X.lp[i] <= 0.0 || S.lp[i] <= 0.0) throw NotInteriorPoint("nt_scaling: LP coordinate not interior");
    w.w_lp[i] = std::sqrt(X.lp[i] / S.lp[i]);
  }

  // W = X^{1/2} (X^{1/2} S X^{1/2})^{-1/2} X^{1/2}
  const EigenDecomposition ex = eig_sym(X.psd);
  if (ex.values.minCoeff() <= 0.0) throw NotInteriorPoint("nt_scaling: X not positive definite");
  const Matrix Xh = psd_power(ex, 0.5);
  const Matrix M = symmetrize(Xh * S.psd * Xh);
  const EigenDecomposition em = eig_sym(M);
  if (em.values.minCoeff() <= 0.0) throw NotInteriorPoint("nt_scaling: S not positive definite");
  w.W_psd = symmetrize(Xh * psd_power(em, -0.5) * Xh);
  w.eig_W = eig_sym(w.W_psd);
  return w;
}

double duality_mu(const ConePoint& X, const ConePoint& S) {
  if (X.lp.size() != S.lp.size() || X.psd.rows() != S.psd.rows())
    throw InvalidDimension("duality_mu: layouts differ");
  const double gap = X.psd.cwiseProduct(S.psd).sum() + X.lp.dot(S.lp);
  return gap / static_cast<double>(X.psd.rows() + X.lp.size());
}

double centrality(const ConePoint& X, const ConePoint& S, double mu) {
  if (mu <= 0.0) throw NotInteriorPoint("centrality: mu must be positive");
  double c = 0.0;
  for (Eigen::Index i = 0; i < X.lp.size(); ++i) {
    if (X.lp[i] <= 0.0 || S.lp[i] <= 0.0) throw NotInteriorPoint("centrality: LP coordinate not interior");
    c = std::max(c, std::abs(X.lp[i] * S.lp[i] / mu - 1.0));
  }
  if (X.psd.rows() > 0) {
    const EigenDecomposition ex = eig_sym(X.psd);
    if (ex.values.minCoeff() <= 0.0) throw NotInteriorPoint("centrality: X not positive definite");
    const Matrix M = congruence_power(ex, S.psd, 0.5) / mu -
                     Matrix::Identity(X.psd.rows(), X.psd.rows());
    Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
    c = std::max(c, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return c;
}

}  // namespace lrsdp
