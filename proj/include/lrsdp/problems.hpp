#pragma once

#include <string>
#include <vector>

#include "lrsdp/ipm.hpp"
#include "lrsdp/rng.hpp"

namespace lrsdp {

// Robust matrix completion instance: measurements are m subsampled svec
// coordinates of X* = G G' (off-diagonals carry sqrt(2)), with m_outliers of
// them corrupted by N(0, 1e4) noise.
struct RmcInstance {
  Eigen::Index n = 0;
  Eigen::Index r_star = 0;
  Eigen::Index m = 0;
  Eigen::Index m_outliers = 0;
  std::uint64_t seed = 0;
  double lambda = 1.0;
  Matrix G;                                // n x r_star
  Matrix X_star;                           // G G'
  std::vector<Eigen::Index> sample_index;  // m svec coordinates
  std::vector<Eigen::Index> outlier_index; // positions in 0..m-1
  Vector b;
};

// Emit the l1-loss + trace-regularized SDP
//   min 1'v + 1'w + lambda tr(X)  s.t.  v - w + P_m svec(X) = b,  v,w >= 0, X >= 0
// together with the generating instance.
std::pair<ConicProgram, RmcInstance> gen_rmc(Eigen::Index n, Eigen::Index r_star, Eigen::Index m,
                                             Eigen::Index m_outliers, double lambda,
                                             std::uint64_t seed);

struct CenteredIterate {
  Matrix X;
  Matrix S;
  double mu = 0.0;
};

// Centered primal-dual pairs along mu_list around a strictly complementary
// pair (X* S* = 0, X* + S* > 0): X = X* + O(mu), S = S* + O(1) perturbations
// kept within centrality <= delta_target.
std::vector<CenteredIterate> gen_centered_iterates(const Matrix& X_star, const Matrix& S_star,
                                                   const std::vector<double>& mu_list,
                                                   double delta_target, std::uint64_t seed);

double reconstruction_error(const Matrix& X, const RmcInstance& instance);

// Plain-text "LRSDP 1" problem files; doubles are written with 17 significant
// digits so a round trip is bit exact.
void save_problem(const std::string& path, const ConicProgram& prog);
ConicProgram load_problem(const std::string& path);

}  // namespace lrsdp
