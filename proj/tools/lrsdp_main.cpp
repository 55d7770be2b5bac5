// Command-line driver: instance generation, solving, and the conditioning /
// scaling / Krylov studies as plot-ready CSV.

#include <CLI11.hpp>
#include <lrsdp/ipm.hpp>
#include <lrsdp/problems.hpp>
#include <lrsdp/runtime.hpp>
#include <lrsdp/studies.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

using namespace lrsdp;

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

std::FILE* open_or_die(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) {
    std::fprintf(stderr, "error: cannot open %s for writing\n", path.c_str());
    std::exit(kExitNumerical);
  }
  return f;
}

void write_solve_csv(const std::string& path, const IpmResult& res) {
  std::FILE* f = open_or_die(path);
  std::fprintf(f, "# lrsdp solve log v1\n");
  std::fprintf(f, "iter,mu,centrality,r,tau,inner_iters,cum_inner_iters,setup_s,krylov_s,feas_p,feas_d\n");
  for (const auto& row : res.log)
    std::fprintf(f, "%d,%.17g,%.17g,%ld,%.17g,%ld,%ld,%.6g,%.6g,%.17g,%.17g\n", row.iter, row.mu,
                 row.centrality, static_cast<long>(row.r), row.tau,
                 static_cast<long>(row.inner_pred + row.inner_corr),
                 static_cast<long>(row.cum_inner), row.setup_s, row.krylov_s, row.feas_p,
                 row.feas_d);
  std::fclose(f);
}

int cmd_generate(Eigen::Index n, Eigen::Index rank, Eigen::Index m, Eigen::Index outliers,
                 double lambda, std::uint64_t seed, const std::string& out) {
  auto [prog, inst] = gen_rmc(n, rank, m, outliers, lambda, seed);
  save_problem(out, prog);
  std::printf("wrote %s\n", out.c_str());
  std::printf("robust matrix completion: n=%ld rank=%ld m=%ld outliers=%ld lambda=%g seed=%llu\n",
              static_cast<long>(n), static_cast<long>(rank), static_cast<long>(m),
              static_cast<long>(outliers), lambda, static_cast<unsigned long long>(seed));
  std::printf("variables: %ld lp + %ld svec, ||b|| = %.6g\n",
              static_cast<long>(prog.layout.lp_dim), static_cast<long>(prog.layout.svec_dim()),
              prog.b.norm());
  return kExitOk;
}

int cmd_solve(const std::string& problem, const std::string& method, Eigen::Index rhat,
              double beta, double tol, const std::string& log_csv) {
  const ConicProgram prog = load_problem(problem);
  IpmOptions opts;
  opts.r_hat = rhat;
  opts.beta = beta;
  opts.tol_mu = tol;
  opts.krylov.method = method == "minres" ? NewtonMethod::Minres : NewtonMethod::Pcg;
  const IpmResult res = solve(prog, opts);

  if (!log_csv.empty()) write_solve_csv(log_csv, res);

  const char* status = res.status == IpmStatus::Solved           ? "solved"
                       : res.status == IpmStatus::MaxIterations  ? "max-iterations"
                                                                 : "numerical-failure";
  std::printf("status: %s after %zu iterations (%ld inner)\n", status, res.log.size(),
              static_cast<long>(res.cumulative_inner()));
  std::printf("objective: %.12g\n", res.objective);
  std::printf("mu: %.6e   primal feas: %.3e   dual feas: %.3e\n", res.mu, res.feas_p, res.feas_d);
  if (prog.has_ground_truth())
    std::printf("reconstruction error: %.6e\n", (res.X.psd - prog.ground_truth()).norm());
  return res.status == IpmStatus::NumericalFailure ? kExitNumerical : kExitOk;
}

int cmd_condition_study(Eigen::Index n, const std::vector<double>& mu_grid, std::uint64_t seed,
                        const std::string& out) {
  const auto rows = condition_study(n, mu_grid, seed);
  std::FILE* f = open_or_die(out);
  std::fprintf(f, "# lrsdp condition-study v1\n");
  std::fprintf(f, "mu,cond_augmented,cond_kkt,delta,L,chi1,chi2,cond_AAt,thm_bound\n");
  for (const auto& r : rows)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.mu, r.cond_aug,
                 r.cond_kkt, r.delta_hat, r.L_hat, r.chi1, r.chi2_hat, r.cond_AAt, r.thm_bound);
  std::fclose(f);
  std::printf("wrote %s (%zu rows)\n", out.c_str(), rows.size());
  return kExitOk;
}

int cmd_scaling_study(const std::vector<Eigen::Index>& n_grid, const std::string& m_mode,
                      std::uint64_t seed, const std::string& out) {
  const auto rows = scaling_study(n_grid, m_mode == "quadratic", seed);
  std::FILE* f = open_or_die(out);
  std::fprintf(f, "# lrsdp scaling-study v1\n");
  std::fprintf(f, "n,m,setup_s,periter_s\n");
  for (const auto& r : rows)
    std::fprintf(f, "%ld,%ld,%.6g,%.6g\n", static_cast<long>(r.n), static_cast<long>(r.m),
                 r.setup_s, r.periter_s);
  std::fclose(f);
  if (rows.size() > 1)
    std::printf("log-log slopes: setup %.2f, per-iteration %.2f\n", loglog_slope(rows, true),
                loglog_slope(rows, false));
  std::printf("wrote %s (%zu rows)\n", out.c_str(), rows.size());
  return kExitOk;
}

int cmd_krylov_compare(const std::string& problem, const std::vector<Eigen::Index>& ranks,
                       const std::string& out) {
  const ConicProgram prog = load_problem(problem);
  const auto rows = krylov_compare(prog, ranks);
  std::FILE* f = open_or_die(out);
  std::fprintf(f, "# lrsdp krylov-compare v1\n");
  std::fprintf(f, "r,method,converged,iter,residual,relative_residual\n");
  for (const auto& row : rows) {
    const auto emit = [&](const char* method, bool conv, const std::vector<double>& hist) {
      const double r0 = hist.empty() ? 1.0 : hist.front();
      for (std::size_t k = 0; k < hist.size(); ++k)
        std::fprintf(f, "%ld,%s,%d,%zu,%.17g,%.17g\n", static_cast<long>(row.r), method, conv, k,
                     hist[k], hist[k] / r0);
    };
    emit("pcg", row.pcg_converged, row.pcg_history);
    emit("minres", row.minres_converged, row.minres_history);
  }
  std::fclose(f);
  for (const auto& row : rows)
    std::printf("r=%ld: pcg %zu iters (%s), minres %zu iters (%s)\n", static_cast<long>(row.r),
                row.pcg_history.size() - 1, row.pcg_converged ? "converged" : "unconverged",
                row.minres_history.size() - 1, row.minres_converged ? "converged" : "unconverged");
  std::printf("wrote %s\n", out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  lrsdp::tune_allocator();

  CLI::App app{"Primal-dual interior-point solver for low-rank semidefinite programs"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value file");

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a robust matrix completion instance");
  long g_n = 50, g_rank = 2, g_m = 800, g_outliers = 6;
  double g_lambda = 1.0;
  std::uint64_t g_seed = 1;
  std::string g_out = "problem.lrsdp";
  gen->add_option("--n", g_n, "Matrix order");
  gen->add_option("--rank", g_rank, "Ground-truth rank");
  gen->add_option("--m", g_m, "Number of sampled entries");
  gen->add_option("--outliers", g_outliers, "Number of corrupted measurements");
  gen->add_option("--lambda", g_lambda, "Trace regularization weight");
  gen->add_option("--seed", g_seed, "Random seed");
  gen->add_option("--out", g_out, "Output problem file");

  // solve
  auto* sol = app.add_subcommand("solve", "Solve an LRSDP problem file");
  std::string s_problem, s_method = "pcg", s_csv;
  long s_rhat = 0;
  double s_beta = 3.0, s_tol = 1e-12;
  sol->add_option("--problem", s_problem, "Problem file")->required();
  sol->add_option("--method", s_method, "Inner solver")->check(CLI::IsMember({"pcg", "minres"}));
  sol->add_option("--rhat", s_rhat, "Maximum rank parameter (0 = auto)");
  sol->add_option("--beta", s_beta, "Preconditioner beta");
  sol->add_option("--tol", s_tol, "Duality-gap tolerance");
  sol->add_option("--log-csv", s_csv, "Per-iteration CSV path");

  // condition-study
  auto* cond = app.add_subcommand("condition-study", "Condition numbers along a centered sweep");
  long c_n = 24;
  std::vector<double> c_grid;
  std::uint64_t c_seed = 1;
  std::string c_out = "condition.csv";
  cond->add_option("--n", c_n, "Matrix order (8..60)");
  cond->add_option("--mu-grid", c_grid, "List of mu values")->delimiter(',');
  cond->add_option("--seed", c_seed, "Random seed");
  cond->add_option("--out", c_out, "Output CSV");

  // scaling-study
  auto* scal = app.add_subcommand("scaling-study", "Setup and per-iteration timing over n");
  std::vector<long> n_grid{50, 100, 200, 400};
  std::string m_mode = "linear";
  std::uint64_t sc_seed = 1;
  std::string sc_out = "scaling.csv";
  scal->add_option("--n-grid", n_grid, "List of matrix orders")->delimiter(',');
  scal->add_option("--m-mode", m_mode, "m = 20n (linear) or n(n+1)/2 (quadratic)")
      ->check(CLI::IsMember({"linear", "quadratic"}));
  scal->add_option("--seed", sc_seed, "Random seed");
  scal->add_option("--out", sc_out, "Output CSV");

  // krylov-compare
  auto* kry = app.add_subcommand("krylov-compare", "PCG vs MINRES on the final Newton system");
  std::string k_problem, k_out = "krylov.csv";
  std::vector<long> k_ranks{2, 5, 10};
  kry->add_option("--problem", k_problem, "Problem file")->required();
  kry->add_option("--ranks", k_ranks, "Rank parameters")->delimiter(',');
  kry->add_option("--out", k_out, "Output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed())
      return cmd_generate(g_n, g_rank, g_m, g_outliers, g_lambda, g_seed, g_out);
    if (sol->parsed()) return cmd_solve(s_problem, s_method, s_rhat, s_beta, s_tol, s_csv);
    if (cond->parsed()) {
      if (c_grid.empty())
        for (int k = 2; k <= 10; ++k) c_grid.push_back(std::pow(10.0, -k));
      return cmd_condition_study(c_n, c_grid, c_seed, c_out);
    }
    if (scal->parsed()) {
      std::vector<Eigen::Index> grid(n_grid.begin(), n_grid.end());
      return cmd_scaling_study(grid, m_mode, sc_seed, sc_out);
    }
    if (kry->parsed()) {
      std::vector<Eigen::Index> ranks(k_ranks.begin(), k_ranks.end());
      return cmd_krylov_compare(k_problem, ranks, k_out);
    }
  } catch (const lrsdp::InvalidDimension& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitUsage;
}
