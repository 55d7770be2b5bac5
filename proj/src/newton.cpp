#include "lrsdp/newton.hpp"

#include <cmath>

namespace lrsdp {

Vector apply_augmented(const AugmentedSystem& sys, const Vector& uv) {
  const Eigen::Index m = sys.constraints->m();
  const Eigen::Index d = sys.dec->d_total();
  if (uv.size() != m + d) throw InvalidDimension("apply_augmented: dimension mismatch");
  const Vector u = uv.head(m);
  const Vector v = uv.tail(d);
  const Vector Atu = sys.constraints->adjoint(u);

  Vector out(m + d);
  out.head(m) = sys.constraints->forward(apply_E_full(*sys.dec, Atu) + apply_Q_full(*sys.dec, v));
  const double tau2 = sys.dec->tau * sys.dec->tau;
  out.tail(d) = apply_Qt_full(*sys.dec, Atu) - tau2 * v.cwiseQuotient(sigma_inv_full(*sys.dec));
  return out;
}

LinearOperator AugmentedSystem::as_operator() const {
  const AugmentedSystem sys = *this;
  return LinearOperator{dim(), [sys](const Vector& uv) { return apply_augmented(sys, uv); }};
}

Vector build_rhs(const AugmentedSystem& sys, const NewtonRhs& rhs) {
  const Eigen::Index m = sys.constraints->m();
  const Eigen::Index d = sys.dec->d_total();
  if (rhs.b_tilde.size() != m || rhs.c_tilde.size() != sys.constraints->layout().total_dim())
    throw InvalidDimension("build_rhs: dimension mismatch");
  const double tau2 = sys.dec->tau * sys.dec->tau;
  Vector out(m + d);
  out.head(m) = rhs.b_tilde + tau2 * sys.constraints->forward(apply_E_full(*sys.dec, rhs.c_tilde));
  out.tail(d) = tau2 * apply_Qt_full(*sys.dec, rhs.c_tilde);
  return out;
}

SchurPreconditioner build_preconditioner(const AugmentedSystem& sys, double beta) {
  if (!(beta > 0.0)) throw PreconditionerFailure("build_preconditioner: beta must be positive");
  const Eigen::Index d = sys.dec->d_total();
  const double tau2 = sys.dec->tau * sys.dec->tau;

  // C = tau^2 Sigma + beta^{-1} Q_op' A' A Q_op, built one column per basis
  // vector so no m x d matrix is ever stored.
  Matrix C = Matrix::Zero(d, d);
  Vector e = Vector::Zero(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    e[k] = 1.0;
    const Vector Aq = sys.constraints->forward(apply_Q_full(*sys.dec, e));
    C.col(k) = apply_Qt_full(*sys.dec, sys.constraints->adjoint(Aq)) / beta;
    e[k] = 0.0;
  }
  C = symmetrize(C);
  C.diagonal() += tau2 * sigma_inv_full(*sys.dec).cwiseInverse();

  SchurPreconditioner prec;
  prec.beta = beta;
  prec.C_factor.compute(C);
  if (prec.C_factor.info() != Eigen::Success)
    throw PreconditionerFailure("build_preconditioner: Schur complement not positive definite");
  return prec;
}

Vector apply_preconditioner(const SchurPreconditioner& prec, const AugmentedSystem& sys,
                            const Vector& fg) {
  const Eigen::Index m = sys.constraints->m();
  const Eigen::Index d = sys.dec->d_total();
  if (fg.size() != m + d) throw InvalidDimension("apply_preconditioner: dimension mismatch");
  const Vector f = fg.head(m);
  const Vector g = fg.tail(d);

  // Block elimination of [beta I, A Q_op; Q_op' A', -tau^2 Sigma]:
  //   v = C^{-1}(beta^{-1} Q_op' A' f - g),  u = beta^{-1}(f - A Q_op v).
  const Vector t = apply_Qt_full(*sys.dec, sys.constraints->adjoint(f));
  const Vector v = prec.C_factor.solve(t / prec.beta - g);
  if (!v.allFinite()) throw PreconditionerFailure("apply_preconditioner: non-finite solve");
  Vector out(m + d);
  out.head(m) = (f - sys.constraints->forward(apply_Q_full(*sys.dec, v))) / prec.beta;
  out.tail(d) = v;
  return out;
}

NewtonDirection solve_newton(const AugmentedSystem& sys, const NewtonRhs& rhs,
                             const NewtonSolveOptions& opts) {
  const Eigen::Index m = sys.constraints->m();
  const Eigen::Index d = sys.dec->d_total();
  const double tau2 = sys.dec->tau * sys.dec->tau;
  const Vector aug_rhs = build_rhs(sys, rhs);
  const LinearOperator A = sys.as_operator();

  SchurPreconditioner local;
  const SchurPreconditioner* prec = opts.prec;
  if (opts.method == NewtonMethod::Pcg && prec == nullptr) {
    local = build_preconditioner(sys, opts.beta);
    prec = &local;
  }
  const AugmentedSystem syscopy = sys;
  LinearOperator P{sys.dim(), [syscopy, prec](const Vector& fg) {
                     return apply_preconditioner(*prec, syscopy, fg);
                   }};

  KrylovOptions kopts;
  kopts.tol = opts.tol;
  kopts.max_iter = opts.max_iter;

  KrylovResult kres;
  if (opts.method == NewtonMethod::Pcg) {
    // v0 = -Sigma^{-1} Q_op' c~, then one exact preconditioner step. The
    // pre-step strips the range(A Q_op) component of the initial residual,
    // whose cancellation otherwise poisons the <r, P^{-1} r> recurrence; it
    // also preserves the consistency relation of the bottom block.
    Vector x0 = Vector::Zero(m + d);
    x0.tail(d) = -apply_Qt_full(*sys.dec, rhs.c_tilde).cwiseProduct(sigma_inv_full(*sys.dec));
    x0 += apply_preconditioner(*prec, sys, aug_rhs - apply_augmented(sys, x0));
    kres = pcg(A, aug_rhs, P, x0, kopts);
    ++kres.iterations;  // account for the pre-step
  } else {
    kres = minres(A, aug_rhs, LinearOperator::identity(sys.dim()), Vector::Zero(m + d), kopts);
  }

  // One round of iterative refinement. The u block of the solution scales as
  // tau^2 dy, far below the other components; refining against the residual
  // recovers it to full relative accuracy before the tau^{-2} recovery.
  {
    const Vector rho = aug_rhs - apply_augmented(sys, kres.x);
    if (rho.norm() > 0.0) {
      KrylovOptions ropts;
      ropts.tol = 1e-12 * rho.norm();
      ropts.max_iter = std::min<Eigen::Index>(opts.max_iter, 60);
      ropts.stagnation_window = 10;
      ropts.stagnation_rtol = 1e-3;
      KrylovResult ref;
      if (opts.method == NewtonMethod::Pcg) {
        Vector z0 = apply_preconditioner(*prec, sys, rho);
        ref = pcg(A, rho, P, z0, ropts);
        ++ref.iterations;
      } else {
        ref = minres(A, rho, LinearOperator::identity(sys.dim()), Vector::Zero(m + d), ropts);
      }
      const Vector candidate = kres.x + ref.x;
      const double cand_res = (aug_rhs - apply_augmented(sys, candidate)).norm();
      kres.iterations += ref.iterations;
      if (cand_res < kres.final_residual) {
        kres.x = candidate;
        kres.final_residual = cand_res;
        if (cand_res <= opts.tol) kres.converged = true;
      }
    }
  }

  const Vector u = kres.x.head(m);
  const Vector v = kres.x.tail(d);
  NewtonDirection dir;
  dir.dy = u / tau2;
  dir.dX = apply_E_full(*sys.dec, sys.constraints->adjoint(u) - tau2 * rhs.c_tilde) +
           apply_Q_full(*sys.dec, v);
  dir.dS = rhs.c_tilde - sys.constraints->adjoint(dir.dy);
  dir.converged = kres.converged;
  dir.aug_residual = kres.final_residual;
  dir.iterations = kres.iterations;
  return dir;
}

double kkt_residual_check(const NtScaling& scaling, const ConstraintOperator& constraints,
                          const NewtonDirection& direction, const NewtonRhs& rhs) {
  const ConeLayout& layout = constraints.layout();
  const Eigen::Index l = layout.lp_dim;
  if (scaling.eig_W.values.minCoeff() <= 0.0)
    throw NotInteriorPoint("kkt_residual_check: W not positive definite");

  // (W (x)_s W)^{-1} svec(dX) = svec(W^{-1} dX W^{-1})
  const Matrix dXmat = smat(direction.dX.tail(layout.svec_dim()));
  Vector scaled(layout.total_dim());
  scaled.head(l) = direction.dX.head(l).cwiseQuotient(scaling.w_lp.cwiseAbs2());
  scaled.tail(layout.svec_dim()) = svec(congruence_power(scaling.eig_W, dXmat, -1.0));

  const Vector dual_res = -scaled + constraints.adjoint(direction.dy) - rhs.c_tilde;
  const Vector primal_res = constraints.forward(direction.dX) - rhs.b_tilde;
  return std::sqrt(dual_res.squaredNorm() + primal_res.squaredNorm());
}

}  // namespace lrsdp
