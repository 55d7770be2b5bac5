#pragma once

#include <optional>
#include <vector>

#include "lrsdp/newton.hpp"

namespace lrsdp {

// Standard-form conic program over the mixed cone:
//   min <cost, x>  s.t.  A x = b,  x in (R_+^l) x (S_+^n),
// with x flat (lp | svec). ground_truth_factor is the n x r factor G of a
// known rank-r solution X* = G G' (0x0 when unknown).
struct ConicProgram {
  ConstraintOperator constraints;
  Vector b;
  Vector cost;
  ConeLayout layout;
  Matrix ground_truth_factor;

  bool has_ground_truth() const { return ground_truth_factor.size() > 0; }
  Matrix ground_truth() const { return ground_truth_factor * ground_truth_factor.transpose(); }
};

struct KrylovConfig {
  NewtonMethod method = NewtonMethod::Pcg;
  double tol_rel = 1e-10;     // relative to the augmented rhs norm
  Eigen::Index cap = 5000;
};

struct IpmOptions {
  double tol_mu = 1e-12;
  double tol_feas = 1e-10;
  int max_outer = 100;
  Eigen::Index r_hat = 0;     // 0 = min(max(n/10, 1), 15, n-1)
  double beta = 3.0;
  double step_fraction = 0.99;
  KrylovConfig krylov;
  bool record_trajectory = false;
  bool verbose = false;
};

struct IterationRow {
  int iter = 0;
  double mu = 0.0;
  double centrality = 0.0;
  double feas_p = 0.0;
  double feas_d = 0.0;
  Eigen::Index r = 0;
  double tau = 0.0;
  Eigen::Index inner_pred = 0;
  Eigen::Index inner_corr = 0;
  Eigen::Index cum_inner = 0;
  double setup_s = 0.0;
  double krylov_s = 0.0;
  bool pcg_ok = true;  // primary PCG solves converged without MINRES fallback
};

// Iterate snapshot kept when record_trajectory is on (assumption diagnostics).
struct TrajectoryPoint {
  ConePoint X;
  ConePoint S;
  Vector y;
  double mu = 0.0;
  Eigen::Index r = 0;
  Matrix Q;  // top-r eigenvectors of W at this iterate
};

enum class IpmStatus { Solved, MaxIterations, NumericalFailure };

struct IpmResult {
  ConePoint X;
  Vector y;
  ConePoint S;
  IpmStatus status = IpmStatus::MaxIterations;
  double objective = 0.0;
  double mu = 0.0;
  double feas_p = 0.0;
  double feas_d = 0.0;
  std::vector<IterationRow> log;
  std::vector<TrajectoryPoint> trajectory;

  Eigen::Index cumulative_inner() const { return log.empty() ? 0 : log.back().cum_inner; }
};

// Mehrotra-style predictor-corrector path following with NT directions; the
// Newton system of every solve goes through the augmented reformulation.
IpmResult solve(const ConicProgram& prog, const IpmOptions& opts = {});

// Newton right-hand side at the current iterate:
//   b~ = b - A(x)
//   c~ = (cost - s - A'y) - (W (x)_s W)^{-1} r_c,   r_c = sigma mu S^{-1} - X [- corrector]
// The optional affine pair adds the Mehrotra second-order term to r_c.
NewtonRhs newton_rhs(const ConicProgram& prog, const ConePoint& X, const Vector& y,
                     const ConePoint& S, const NtScaling& scaling, double sigma, double mu,
                     const Vector* dX_aff = nullptr, const Vector* dS_aff = nullptr);

// Largest alpha in (0, 1] keeping point + alpha * direction in the closed
// cone, damped: returns min(1, step_fraction * alpha_boundary).
double max_step(const ConePoint& point, const ConePoint& direction, double step_fraction = 0.99);

// Undamped distance to the cone boundary (+inf when the ray stays inside).
double boundary_alpha(const ConePoint& point, const ConePoint& direction);

// Empirical checks of the strict-complementarity / injectivity assumptions at
// one iterate. mu is chosen so the centrality equals 0.1 when attainable.
struct AssumptionReport {
  double mu = 0.0;
  double delta_hat = 0.0;
  std::optional<double> L_X;       // ||X - X*|| / mu
  std::optional<double> L_S;       // ||S - S*||
  double chi2_hat = 0.0;           // 1 / sigma_min((A A')^{-1/2} A Q_op)
  Eigen::Index r = 0;
};

AssumptionReport diagnostics(const ConstraintOperator& constraints, const ConePoint& X,
                             const ConePoint& S, Eigen::Index r_hat,
                             const Matrix* X_star = nullptr, const Matrix* S_star = nullptr);

// mu with centrality(X, S, mu) == target when such a value exists; otherwise
// the minimizer of the centrality over mu.
double mu_for_centrality(const ConePoint& X, const ConePoint& S, double target);

}  // namespace lrsdp
