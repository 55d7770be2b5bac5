#pragma once

#include "lrsdp/symlin.hpp"

namespace lrsdp {

// Mixed cone: nonnegative orthant of dimension lp_dim followed by one PSD
// block of order psd_order. Flat primal vectors are laid out (lp | svec).
struct ConeLayout {
  Eigen::Index lp_dim = 0;
  Eigen::Index psd_order = 1;

  Eigen::Index svec_dim() const { return svec_length(psd_order); }
  Eigen::Index total_dim() const { return lp_dim + svec_dim(); }
};

// One point of the mixed cone.
struct ConePoint {
  Vector lp;   // length lp_dim
  Matrix psd;  // symmetric, psd_order x psd_order

  static ConePoint Identity(const ConeLayout& layout, double lp_scale = 1.0, double psd_scale = 1.0) {
    ConePoint p;
    p.lp = Vector::Constant(layout.lp_dim, lp_scale);
    p.psd = psd_scale * Matrix::Identity(layout.psd_order, layout.psd_order);
    return p;
  }

  Vector flat() const {
    Vector v(lp.size() + svec_length(psd.rows()));
    v.head(lp.size()) = lp;
    v.tail(svec_length(psd.rows())) = svec(psd);
    return v;
  }

  static ConePoint from_flat(const ConeLayout& layout, const Vector& v) {
    ConePoint p;
    p.lp = v.head(layout.lp_dim);
    p.psd = smat(v.tail(layout.svec_dim()));
    return p;
  }

  // Smallest eigenvalue / entry; positive iff strictly interior.
  double min_eig() const;
};

// Nesterov-Todd scaling of a strictly interior primal-dual pair: the unique
// W > 0 with W S W = X on the PSD block, w_i = sqrt(x_i / s_i) on the LP block.
struct NtScaling {
  Vector w_lp;
  Matrix W_psd;
  EigenDecomposition eig_W;  // of W_psd, descending
};

NtScaling nt_scaling(const ConePoint& X, const ConePoint& S);

// Normalized duality gap (tr(X S) + x's) / (n + l).
double duality_mu(const ConePoint& X, const ConePoint& S);

// max over blocks of || (1/mu) X^{1/2} S X^{1/2} - I || (spectral norm for the
// PSD block, max_i |x_i s_i / mu - 1| for the LP block).
double centrality(const ConePoint& X, const ConePoint& S, double mu);

// Symmetric square root / inverse square root from an eigendecomposition.
Matrix psd_power(const EigenDecomposition& dec, double exponent);

// W^p M W^p computed in the eigenbasis of W: U ((U'MU) o (w_i^p w_j^p)) U'.
// Unlike the dense triple product, the elementwise scaling is exact, so
// entries that the scaling suppresses do not inherit error from the large
// ones; the interior-point updates rely on that structure near the boundary.
Matrix congruence_power(const EigenDecomposition& dec, const Matrix& M, double exponent);

}  // namespace lrsdp
