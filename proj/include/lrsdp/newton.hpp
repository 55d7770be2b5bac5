#pragma once

#include <Eigen/Cholesky>
#include <Eigen/SparseCore>

#include "lrsdp/decomp.hpp"
#include "lrsdp/krylov.hpp"

namespace lrsdp {

// Linear constraint map over flat (lp | svec) primal vectors, stored sparse.
// forward(x) = A x, adjoint(y) = A' y; both cost O(nnz).
class ConstraintOperator {
 public:
  ConstraintOperator() = default;
  ConstraintOperator(ConeLayout layout, Eigen::SparseMatrix<double, Eigen::RowMajor> A)
      : layout_(layout), A_(std::move(A)) {
    if (A_.cols() != layout_.total_dim())
      throw InvalidDimension("ConstraintOperator: columns do not match cone layout");
  }

  Eigen::Index m() const { return A_.rows(); }
  const ConeLayout& layout() const { return layout_; }
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const { return A_; }

  Vector forward(const Vector& x) const {
    if (x.size() != A_.cols()) throw InvalidDimension("forward: dimension mismatch");
    return A_ * x;
  }
  Vector adjoint(const Vector& y) const {
    if (y.size() != A_.rows()) throw InvalidDimension("adjoint: dimension mismatch");
    return A_.transpose() * y;
  }

 private:
  ConeLayout layout_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> A_;
};

// Matrix-free augmented reformulation of the scaled Newton system,
//
//   [ A E_op A'   A Q_op   ] [u]   [ b~ + tau^2 A E_op c~ ]
//   [ Q_op' A'  -tau^2 Sigma] [v] = [ tau^2 Q_op' c~       ],
//
// over vectors [u (m) | v (d_total)].
struct AugmentedSystem {
  const ConstraintOperator* constraints = nullptr;
  const ScalingDecomposition* dec = nullptr;

  Eigen::Index dim() const { return constraints->m() + dec->d_total(); }
  LinearOperator as_operator() const;
};

Vector apply_augmented(const AugmentedSystem& sys, const Vector& uv);

// Newton residuals: b~ in R^m and c~ over flat (lp | svec) coordinates.
struct NewtonRhs {
  Vector b_tilde;
  Vector c_tilde;
};

Vector build_rhs(const AugmentedSystem& sys, const NewtonRhs& rhs);

// Indefinite preconditioner sharing the off-diagonal blocks of the augmented
// system, applied through the dense Cholesky factor of
// C = tau^2 Sigma + beta^{-1} Q_op' A' A Q_op.
struct SchurPreconditioner {
  double beta = 3.0;
  Eigen::LLT<Matrix> C_factor;
};

SchurPreconditioner build_preconditioner(const AugmentedSystem& sys, double beta);
Vector apply_preconditioner(const SchurPreconditioner& prec, const AugmentedSystem& sys,
                            const Vector& fg);

enum class NewtonMethod { Pcg, Minres };

struct NewtonDirection {
  Vector dX;        // flat (lp | svec)
  Vector dy;        // R^m
  Vector dS;        // flat (lp | svec); equals c~ - A'(dy) by construction
  double kkt_residual = 0.0;
  double aug_residual = 0.0;  // final residual of the augmented solve
  bool converged = false;
  Eigen::Index iterations = 0;
};

struct NewtonSolveOptions {
  NewtonMethod method = NewtonMethod::Pcg;
  double beta = 3.0;
  double tol = 1e-10;          // absolute residual on the augmented system
  Eigen::Index max_iter = 5000;
  const SchurPreconditioner* prec = nullptr;  // reused when provided (PCG path)
};

// Solve the augmented system and recover (dX, dy, dS):
//   dy = tau^{-2} u,  dX = E_op(A'u - tau^2 c~) + Q_op v,  dS = c~ - A'(dy).
NewtonDirection solve_newton(const AugmentedSystem& sys, const NewtonRhs& rhs,
                             const NewtonSolveOptions& opts);

// Exact residual norm of the scaled Newton (KKT) system
//   [ -(W (x)_s W)^{-1}  A' ] [svec(dX)]   [c~]
//   [        A           0  ] [  dy    ] - [b~]
// with the LP block entering as diag(1 / w_i^2).
double kkt_residual_check(const NtScaling& scaling, const ConstraintOperator& constraints,
                          const NewtonDirection& direction, const NewtonRhs& rhs);

}  // namespace lrsdp
