#include "lrsdp/decomp.hpp"

#include <cmath>

namespace lrsdp {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

Eigen::Index select_rank(const Vector& values, Eigen::Index r_max) {
  const Eigen::Index n = values.size();
  if (r_max < 1 || r_max >= n) throw InvalidDimension("select_rank: need 1 <= r_max < n");
  Eigen::Index best = 1;
  double best_ratio = -1.0;
  for (Eigen::Index i = 1; i <= r_max; ++i) {
    const double ratio = values[i - 1] / values[i];
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = i;
    }
  }
  return best;
}

ScalingDecomposition build(const NtScaling& scaling, Eigen::Index r) {
  const Eigen::Index n = scaling.eig_W.values.size();
  // r = 0 is allowed only for the degenerate order-1 block, which is carried
  // entirely by the well-conditioned part.
  if (r < 1 && !(n == 1 && r == 0)) throw InvalidDimension("build: need 1 <= r < n");
  if (r >= n) throw InvalidDimension("build: need 1 <= r < n");
  const Vector& w = scaling.eig_W.values;

  ScalingDecomposition dec;
  dec.n = n;
  dec.r = r;
  dec.tau = 0.5 * w[r];  // lambda_{r+1}
  if (!(dec.tau > 0.0) || (r >= 1 && dec.tau >= w[r - 1]))
    throw DegenerateSpectrum("build: tau = " + std::to_string(dec.tau) + " not in (0, lambda_r)");

  dec.Q = scaling.eig_W.vectors.leftCols(r);
  dec.Qperp = scaling.eig_W.vectors.rightCols(n - r);
  dec.Lambda = w.head(r);
  dec.LambdaPerp = w.tail(n - r);

  dec.E = dec.Q * dec.Q.transpose() +
          dec.Qperp * (dec.LambdaPerp / dec.tau).asDiagonal() * dec.Qperp.transpose();
  dec.E = symmetrize(dec.E);

  const double tau2 = dec.tau * dec.tau;
  dec.SigmaInv.resize(r * (r + 1) / 2 + r * (n - r));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = j; i < r; ++i) dec.SigmaInv[k++] = dec.Lambda[i] * dec.Lambda[j] - tau2;
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < n - r; ++i) dec.SigmaInv[k++] = (dec.Lambda[j] - dec.tau) * dec.LambdaPerp[i];
  if (dec.SigmaInv.size() > 0 && dec.SigmaInv.minCoeff() <= 0.0)
    throw DegenerateSpectrum("build: Sigma not positive definite");

  dec.w_lp = scaling.w_lp;
  dec.tau_lp = dec.tau;
  dec.lp_e.resize(dec.w_lp.size());
  for (Eigen::Index i = 0; i < dec.w_lp.size(); ++i) {
    const double wi = dec.w_lp[i];
    if (wi > dec.tau) {
      dec.lp_large.push_back(i);
      dec.lp_e[i] = 1.0;
    } else {
      dec.lp_e[i] = wi * wi / tau2;
    }
  }
  dec.lp_sigma_inv.resize(static_cast<Eigen::Index>(dec.lp_large.size()));
  for (std::size_t k2 = 0; k2 < dec.lp_large.size(); ++k2) {
    const double wi = dec.w_lp[dec.lp_large[k2]];
    dec.lp_sigma_inv[static_cast<Eigen::Index>(k2)] = wi * wi - tau2;
  }
  return dec;
}

Vector apply_E(const ScalingDecomposition& dec, const Vector& x) {
  if (x.size() != svec_length(dec.n)) throw InvalidDimension("apply_E: svec length mismatch");
  const Matrix X = smat(x);
  return svec(symmetrize(dec.E * X * dec.E));
}

Vector apply_Q(const ScalingDecomposition& dec, const Vector& h) {
  const Eigen::Index n = dec.n, r = dec.r;
  const Eigen::Index nb = r * (r + 1) / 2;
  if (h.size() != dec.d_psd()) throw InvalidDimension("apply_Q: coefficient length mismatch");
  const Matrix B = smat(h.head(nb));
  const Eigen::Map<const Matrix> N(h.data() + nb, n - r, r);
  const Matrix U = dec.Q * B + kSqrt2 * (dec.Qperp * N);
  const Matrix M = U * dec.Q.transpose();
  return svec(symmetrize(M));
}

Vector apply_Qt(const ScalingDecomposition& dec, const Vector& x) {
  const Eigen::Index n = dec.n, r = dec.r;
  if (x.size() != svec_length(n)) throw InvalidDimension("apply_Qt: svec length mismatch");
  const Matrix X = smat(x);
  const Matrix Y = X * dec.Q;  // n x r
  Vector out(dec.d_psd());
  out.head(r * (r + 1) / 2) = svec(symmetrize(dec.Q.transpose() * Y));
  const Matrix Np = kSqrt2 * (dec.Qperp.transpose() * Y);
  out.tail(r * (n - r)) = Eigen::Map<const Vector>(Np.data(), Np.size());
  return out;
}

Vector apply_SigmaInv(const ScalingDecomposition& dec, const Vector& v) {
  if (v.size() != dec.d_psd()) throw InvalidDimension("apply_SigmaInv: length mismatch");
  return v.cwiseProduct(dec.SigmaInv);
}

Vector apply_Sigma(const ScalingDecomposition& dec, const Vector& v) {
  if (v.size() != dec.d_psd()) throw InvalidDimension("apply_Sigma: length mismatch");
  return v.cwiseQuotient(dec.SigmaInv);
}

Vector apply_E_full(const ScalingDecomposition& dec, const Vector& x) {
  const Eigen::Index l = dec.w_lp.size();
  if (x.size() != l + svec_length(dec.n)) throw InvalidDimension("apply_E_full: length mismatch");
  Vector out(x.size());
  out.head(l) = x.head(l).cwiseProduct(dec.lp_e);
  out.tail(svec_length(dec.n)) = apply_E(dec, x.tail(svec_length(dec.n)));
  return out;
}

Vector apply_Q_full(const ScalingDecomposition& dec, const Vector& h) {
  const Eigen::Index l = dec.w_lp.size();
  if (h.size() != dec.d_total()) throw InvalidDimension("apply_Q_full: length mismatch");
  Vector out = Vector::Zero(l + svec_length(dec.n));
  for (std::size_t k = 0; k < dec.lp_large.size(); ++k)
    out[dec.lp_large[k]] = h[dec.d_psd() + static_cast<Eigen::Index>(k)];
  out.tail(svec_length(dec.n)) = apply_Q(dec, h.head(dec.d_psd()));
  return out;
}

Vector apply_Qt_full(const ScalingDecomposition& dec, const Vector& x) {
  const Eigen::Index l = dec.w_lp.size();
  if (x.size() != l + svec_length(dec.n)) throw InvalidDimension("apply_Qt_full: length mismatch");
  Vector out(dec.d_total());
  out.head(dec.d_psd()) = apply_Qt(dec, x.tail(svec_length(dec.n)));
  for (std::size_t k = 0; k < dec.lp_large.size(); ++k)
    out[dec.d_psd() + static_cast<Eigen::Index>(k)] = x[dec.lp_large[k]];
  return out;
}

Vector sigma_inv_full(const ScalingDecomposition& dec) {
  Vector out(dec.d_total());
  out.head(dec.d_psd()) = dec.SigmaInv;
  out.tail(dec.lp_sigma_inv.size()) = dec.lp_sigma_inv;
  return out;
}

}  // namespace lrsdp
