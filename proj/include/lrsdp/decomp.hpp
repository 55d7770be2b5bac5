#pragma once

#include <vector>

#include "lrsdp/cones.hpp"

namespace lrsdp {

// Split of the scaling operator into a low-rank ill-conditioned part and a
// well-conditioned part:
//
//   W (x)_s W = Q_op Sigma^{-1} Q_op' + tau^2 * E_op,    tau = lambda_{r+1}(W) / 2,
//
// where E_op = E (x)_s E with E = Q Q' + tau^{-1} Qp Lp Qp', Q_op has the
// orthonormal columns [Q (x)_s Q, sqrt(2) Psi'(Q (x) Qp)], and Sigma^{-1} is
// the diagonal [Lambda (x)_s Lambda - tau^2 I | (Lambda - tau I) (x) Lp].
// None of E_op, Q_op, Sigma is materialized; applies run in O(n^3) / O(n^2 r).
//
// The LP block is split coordinatewise with the same threshold: coordinate i
// is "large" iff w_i > tau, contributing a unit column to Q_op with Sigma^{-1}
// entry w_i^2 - tau^2; small coordinates go to the E part as w_i^2 / tau^2.
struct ScalingDecomposition {
  Eigen::Index n = 0;   // PSD order
  Eigen::Index r = 0;   // chosen rank parameter
  Matrix Q;             // n x r, top eigenvectors of W
  Matrix Qperp;         // n x (n-r)
  Vector Lambda;        // top r eigenvalues, descending
  Vector LambdaPerp;    // bottom n-r eigenvalues
  double tau = 0.0;
  Matrix E;             // dense n x n
  Vector SigmaInv;      // length d_psd = r(r+1)/2 + r(n-r), strictly positive

  // LP block
  Vector w_lp;
  double tau_lp = 0.0;
  std::vector<Eigen::Index> lp_large;  // coordinates with w_i > tau
  Vector lp_sigma_inv;                 // w_i^2 - tau^2 over lp_large
  Vector lp_e;                         // 1 on large coordinates, w_i^2/tau^2 on small

  Eigen::Index d_psd() const { return static_cast<Eigen::Index>(SigmaInv.size()); }
  Eigen::Index d_total() const { return d_psd() + static_cast<Eigen::Index>(lp_large.size()); }
  ConeLayout layout() const { return ConeLayout{w_lp.size(), n}; }
};

// argmax over i in {1..r_max} of values[i] / values[i+1] (1-based), ties
// broken toward the smallest i. `values` must be descending and positive.
Eigen::Index select_rank(const Vector& values, Eigen::Index r_max);

// Build the decomposition from an NT scaling at rank r (1 <= r < n).
ScalingDecomposition build(const NtScaling& scaling, Eigen::Index r);

// PSD-block applies. x is an svec of order n, h has length d_psd laid out
// [svec(B) | vec(N)] with B in S^r and N in R^{(n-r) x r}.
Vector apply_E(const ScalingDecomposition& dec, const Vector& x);
Vector apply_Q(const ScalingDecomposition& dec, const Vector& h);
Vector apply_Qt(const ScalingDecomposition& dec, const Vector& x);
Vector apply_SigmaInv(const ScalingDecomposition& dec, const Vector& v);
Vector apply_Sigma(const ScalingDecomposition& dec, const Vector& v);

// Mixed-cone applies over flat (lp | svec) primal vectors and length-d_total
// coefficient vectors ([psd | lp_large]).
Vector apply_E_full(const ScalingDecomposition& dec, const Vector& x);
Vector apply_Q_full(const ScalingDecomposition& dec, const Vector& h);
Vector apply_Qt_full(const ScalingDecomposition& dec, const Vector& x);
Vector sigma_inv_full(const ScalingDecomposition& dec);  // diagonal of full Sigma^{-1}

}  // namespace lrsdp
