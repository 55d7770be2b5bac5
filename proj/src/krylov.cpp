#include "lrsdp/krylov.hpp"

#include <cmath>

#include "lrsdp/errors.hpp"

namespace lrsdp {

namespace {

Eigen::Index default_max_iter(const KrylovOptions& opts, Eigen::Index dim) {
  return opts.max_iter >= 0 ? opts.max_iter : 10 * dim;
}

// No relative improvement of at least rtol over the trailing window.
bool stagnated(const std::vector<double>& best_so_far, Eigen::Index window, double rtol) {
  const auto k = static_cast<Eigen::Index>(best_so_far.size()) - 1;
  if (k < window) return false;
  return best_so_far[k] > (1.0 - rtol) * best_so_far[k - window];
}

}  // namespace

KrylovResult minres(const LinearOperator& A, const Vector& b, const LinearOperator& P,
                    const Vector& x0, const KrylovOptions& opts) {
  const Eigen::Index max_iter = default_max_iter(opts, A.dim);
  KrylovResult res;
  res.x = x0;

  Vector v_new = b - A.apply(res.x);  // unpreconditioned residual
  double true_res = v_new.norm();
  res.residual_history.push_back(true_res);
  std::vector<double> best_so_far{true_res};
  Vector best_x = res.x;
  double best_res = true_res;

  Vector z_new = P.apply(v_new);
  if (!z_new.allFinite()) throw PreconditionerFailure("minres: preconditioner returned non-finite");
  double beta_sq = z_new.dot(v_new);
  if (beta_sq < 0.0) throw PreconditionerFailure("minres: preconditioner not positive definite");
  double beta = std::sqrt(beta_sq);

  double eta = beta;
  double gamma0 = 1.0, gamma1 = 1.0, sigma0 = 0.0, sigma1 = 0.0;
  Vector v_old = Vector::Zero(A.dim);
  Vector w_old = Vector::Zero(A.dim), w_mid = Vector::Zero(A.dim);

  Eigen::Index it = 0;
  while (true_res > opts.tol && it < max_iter && beta > 0.0) {
    ++it;
    v_new /= beta;
    z_new /= beta;

    Vector q = A.apply(z_new);
    const double alpha = z_new.dot(q);
    if (it > 1) q -= beta * v_old;
    v_old = q - alpha * v_new;

    const double delta = gamma1 * alpha - gamma0 * sigma1 * beta;
    const double rho3 = sigma0 * beta;
    const double rho2 = sigma1 * alpha + gamma0 * gamma1 * beta;

    Vector z_old = P.apply(v_old);
    if (!z_old.allFinite()) throw PreconditionerFailure("minres: preconditioner returned non-finite");
    beta_sq = v_old.dot(z_old);
    if (beta_sq < 0.0) throw PreconditionerFailure("minres: preconditioner not positive definite");
    beta = std::sqrt(beta_sq);
    const double rho1 = std::hypot(delta, beta);
    if (rho1 == 0.0) break;  // exact termination

    // w update: w_new = (z - rho3 w_old - rho2 w_mid) / rho1
    Vector w_new = (z_new - rho3 * w_old - rho2 * w_mid) / rho1;
    gamma0 = gamma1;
    gamma1 = delta / rho1;
    res.x += (gamma1 * eta) * w_new;
    sigma0 = sigma1;
    sigma1 = beta / rho1;
    eta = -sigma1 * eta;

    if (!res.x.allFinite()) throw NumericalFailure("minres: iterate became non-finite");
    true_res = (A.apply(res.x) - b).norm();
    res.residual_history.push_back(true_res);
    if (true_res < best_res) {
      best_res = true_res;
      best_x = res.x;
    }
    best_so_far.push_back(best_res);
    if (opts.iterate_observer) opts.iterate_observer(it, res.x);

    w_old = std::move(w_mid);
    w_mid = std::move(w_new);
    std::swap(v_old, v_new);
    std::swap(z_old, z_new);

    if (true_res > opts.tol && stagnated(best_so_far, opts.stagnation_window, opts.stagnation_rtol)) {
      res.x = best_x;
      res.iterations = it;
      res.final_residual = best_res;
      res.converged = false;
      res.status = KrylovStatus::Stagnation;
      return res;
    }
  }

  res.iterations = it;
  if (true_res <= opts.tol) {
    res.final_residual = true_res;
    res.converged = true;
    res.status = KrylovStatus::Converged;
  } else {
    res.x = best_x;
    res.final_residual = best_res;
    res.converged = false;
    res.status = KrylovStatus::MaxIterations;
  }
  return res;
}

KrylovResult pcg(const LinearOperator& A, const Vector& b, const LinearOperator& P,
                 const Vector& x0, const KrylovOptions& opts) {
  const Eigen::Index max_iter = default_max_iter(opts, A.dim);
  KrylovResult res;
  res.x = x0;

  Vector r = b - A.apply(res.x);
  double true_res = r.norm();
  res.residual_history.push_back(true_res);
  std::vector<double> best_so_far{true_res};
  Vector best_x = res.x;
  double best_res = true_res;

  Vector z = P.apply(r);
  if (!z.allFinite()) throw PreconditionerFailure("pcg: preconditioner returned non-finite");
  Vector p = z;
  double rz = r.dot(z);

  Eigen::Index it = 0;
  while (true_res > opts.tol && it < max_iter) {
    ++it;
    const Vector Ap = A.apply(p);
    const double pAp = p.dot(Ap);
    if (pAp == 0.0) throw Breakdown("pcg: <p, A p> = 0");
    const double alpha = rz / pAp;
    if (!std::isfinite(alpha)) {
      res.x = best_x;
      res.iterations = it - 1;
      res.final_residual = best_res;
      res.converged = false;
      res.status = KrylovStatus::Stagnation;
      return res;
    }
    res.x += alpha * p;
    r -= alpha * Ap;

    true_res = (A.apply(res.x) - b).norm();
    if (!std::isfinite(true_res)) throw NumericalFailure("pcg: iterate became non-finite");
    res.residual_history.push_back(true_res);
    if (true_res < best_res) {
      best_res = true_res;
      best_x = res.x;
    }
    best_so_far.push_back(best_res);
    if (opts.iterate_observer) opts.iterate_observer(it, res.x);
    if (true_res <= opts.tol) break;

    z = P.apply(r);
    if (!z.allFinite()) throw PreconditionerFailure("pcg: preconditioner returned non-finite");
    const double rz_new = r.dot(z);
    const double beta = rz_new / rz;
    if (rz_new == 0.0 || !std::isfinite(beta)) {
      // Krylov space exhausted at the numerical floor.
      res.x = best_x;
      res.iterations = it;
      res.final_residual = best_res;
      res.converged = false;
      res.status = KrylovStatus::Stagnation;
      return res;
    }
    p = z + beta * p;
    rz = rz_new;

    if (stagnated(best_so_far, opts.stagnation_window, opts.stagnation_rtol)) {
      res.x = best_x;
      res.iterations = it;
      res.final_residual = best_res;
      res.converged = false;
      res.status = KrylovStatus::Stagnation;
      return res;
    }
  }

  res.iterations = it;
  if (true_res <= opts.tol) {
    res.final_residual = true_res;
    res.converged = true;
    res.status = KrylovStatus::Converged;
  } else {
    res.x = best_x;
    res.final_residual = best_res;
    res.converged = false;
    res.status = KrylovStatus::MaxIterations;
  }
  return res;
}

}  // namespace lrsdp
