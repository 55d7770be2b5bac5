#pragma once

#include "lrsdp/problems.hpp"

namespace lrsdp {

// One row of the conditioning sweep: spectral condition numbers of the
// augmented reformulation and of the raw scaled-Newton (KKT) matrix at a
// centered iterate, plus the measured inputs of the theoretical bound.
struct ConditionRow {
  double mu = 0.0;
  double cond_aug = 0.0;
  double cond_kkt = 0.0;
  double delta_hat = 0.0;
  double L_hat = 0.0;
  double chi1 = 0.0;
  double chi2_hat = 0.0;
  double cond_AAt = 0.0;
  double thm_bound = 0.0;
};

// Pure-PSD sweep on a rank-2 synthetic instance with m = 4n sampled svec
// coordinates; dense eigenvalue computations, so n should stay <= 60.
std::vector<ConditionRow> condition_study(Eigen::Index n, const std::vector<double>& mu_grid,
                                          std::uint64_t seed);

struct ScalingRow {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  double setup_s = 0.0;    // decomposition + Schur preconditioner
  double periter_s = 0.0;  // one PCG iteration on the augmented system
};

// Time the setup and per-inner-iteration cost on rank-2 robust matrix
// completion instances, with m = 20n (linear) or n(n+1)/2 (quadratic).
std::vector<ScalingRow> scaling_study(const std::vector<Eigen::Index>& n_grid, bool quadratic_m,
                                      std::uint64_t seed);

// Least-squares slope of log(t) against log(n).
double loglog_slope(const std::vector<ScalingRow>& rows, bool setup);

struct KrylovCompareRow {
  Eigen::Index r = 0;
  bool pcg_converged = false;
  bool minres_converged = false;
  std::vector<double> pcg_history;     // true residuals per iteration
  std::vector<double> minres_history;
};

// Extract the final-iteration augmented system of a solved program for each
// rank parameter and run both solvers from the matched initial point [0; v0].
// A presolved result can be passed to skip the solve.
std::vector<KrylovCompareRow> krylov_compare(const ConicProgram& prog,
                                             const std::vector<Eigen::Index>& ranks,
                                             double tol_rel = 1e-10,
                                             const IpmResult* presolved = nullptr);

}  // namespace lrsdp
