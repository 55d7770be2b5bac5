#pragma once

#include <functional>
#include <vector>

#include "lrsdp/symlin.hpp"

namespace lrsdp {

// Matrix-free symmetric operator. For preconditioners, `apply` performs the
// solve r -> P^{-1} r.
struct LinearOperator {
  Eigen::Index dim = 0;
  std::function<Vector(const Vector&)> apply;

  static LinearOperator identity(Eigen::Index dim) {
    return LinearOperator{dim, [](const Vector& v) { return v; }};
  }
  static LinearOperator from_matrix(const Matrix& A) {
    return LinearOperator{A.rows(), [A](const Vector& v) { return Vector(A * v); }};
  }
};

enum class KrylovStatus { Converged, MaxIterations, Stagnation };

struct KrylovResult {
  Vector x;
  Eigen::Index iterations = 0;
  double final_residual = 0.0;  // true residual ||A x - b||, recomputed
  bool converged = false;
  KrylovStatus status = KrylovStatus::MaxIterations;
  std::vector<double> residual_history;  // true residual per iteration, [0] = initial
};

struct KrylovOptions {
  double tol = 1e-10;          // absolute on ||A x - b||
  Eigen::Index max_iter = -1;  // default 10 * dim
  // Stagnation: no relative improvement of at least stagnation_rtol over a
  // trailing window of stagnation_window iterations.
  Eigen::Index stagnation_window = 100;
  double stagnation_rtol = 1e-4;
  // Observer called as (k, x_k) after each iteration (used by equivalence tests).
  std::function<void(Eigen::Index, const Vector&)> iterate_observer;
};

// Preconditioned MINRES for symmetric (possibly indefinite) A and SPD P.
// Stops when the true residual ||A x_k - b|| drops below tol.
KrylovResult minres(const LinearOperator& A, const Vector& b, const LinearOperator& P,
                    const Vector& x0, const KrylovOptions& opts = {});

// Preconditioned conjugate gradients; the indefinite-preconditioner usage
// (A and P sharing an identical indefinite trailing block) is permitted.
KrylovResult pcg(const LinearOperator& A, const Vector& b, const LinearOperator& P,
                 const Vector& x0, const KrylovOptions& opts = {});

}  // namespace lrsdp
