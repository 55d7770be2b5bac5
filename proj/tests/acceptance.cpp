// Acceptance suite: one check per shipped guarantee, one PASS/FAIL line each.
// Run a single criterion with `acceptance <k>`; exit code is the number of
// failures.

#include <lrsdp/ipm.hpp>
#include <lrsdp/problems.hpp>
#include <lrsdp/runtime.hpp>
#include <lrsdp/studies.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>

#include "oracles.hpp"

using namespace lrsdp;

namespace {

using clock_t_ = std::chrono::steady_clock;

double seconds_since(clock_t_::time_point t0) {
  return std::chrono::duration<double>(clock_t_::now() - t0).count();
}

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

// Shared n = 50 Table-1 instance, solved once and reused by criteria 7-11.
struct SolvedInstance {
  ConicProgram prog;
  RmcInstance inst;
  IpmResult res;
  double wall_s = 0.0;
};

const SolvedInstance& table1_row1() {
  static const SolvedInstance cached = [] {
    SolvedInstance s;
    auto pi = gen_rmc(50, 2, 800, 6, 1.0, 2024);
    s.prog = std::move(pi.first);
    s.inst = std::move(pi.second);
    IpmOptions opts;
    opts.record_trajectory = true;
    const auto t0 = clock_t_::now();
    s.res = solve(s.prog, opts);
    s.wall_s = seconds_since(t0);
    return s;
  }();
  return cached;
}

Check criterion1() {
  Check c;
  const auto t0 = clock_t_::now();
  Rng rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 8 + static_cast<Eigen::Index>(rng.uniform_int(23));  // <= 30
    const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng.uniform_int(5));
    const Matrix W = oracle::random_spd(rng, n, 0.02, 4.0);
    const ScalingDecomposition dec = build(oracle::scaling_from_w(W), r);
    const double scale = spectral_norm(W) * spectral_norm(W);
    for (int t = 0; t < 5; ++t) {
      const Vector x = oracle::random_vector(rng, svec_length(n));
      const Vector lhs = apply_Q(dec, apply_SigmaInv(dec, apply_Qt(dec, x))) +
                         dec.tau * dec.tau * apply_E(dec, x);
      const Vector rhs = svec(symmetrize(W * smat(x) * W));
      worst = std::max(worst, (lhs - rhs).norm() / (scale * x.norm()));
    }
  }
  const double elapsed = seconds_since(t0);
  c.require(worst <= 1e-10, "exactness error " + std::to_string(worst));
  c.require(elapsed < 10.0, "runtime " + std::to_string(elapsed) + " s");
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max rel err %.2e, %.1f s", worst, elapsed);
  c.note(buf);
  return c;
}

Check criterion2() {
  Check c;
  Rng rng(1002);
  // Q' Q == I for PSD-only and mixed decompositions
  double worst_gram = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 6 + static_cast<Eigen::Index>(rng.uniform_int(10));
    const Eigen::Index l = trial % 2 == 0 ? 0 : 7;
    Vector w_lp(l);
    for (Eigen::Index i = 0; i < l; ++i) w_lp[i] = 0.02 + 3.0 * rng.uniform();
    const Matrix W = oracle::random_spd(rng, n, 0.05, 3.0);
    const ScalingDecomposition dec =
        build(oracle::scaling_from_w(W, w_lp), 1 + static_cast<Eigen::Index>(rng.uniform_int(4)));
    const Eigen::Index total = l + svec_length(n);
    const Matrix Qfull = oracle::densify(total, dec.d_total(),
                                         [&](const Vector& e) { return apply_Q_full(dec, e); });
    worst_gram = std::max(
        worst_gram,
        (Qfull.transpose() * Qfull - Matrix::Identity(dec.d_total(), dec.d_total()))
            .lpNorm<Eigen::Infinity>());
  }
  c.require(worst_gram <= 1e-12, "Gram deviation " + std::to_string(worst_gram));

  // adjoint identity on every generator-produced operator
  double worst_adj = 0.0;
  const auto adjoint_err = [&](const ConstraintOperator& op) {
    for (int t = 0; t < 30; ++t) {
      const Vector x = oracle::random_vector(rng, op.layout().total_dim());
      const Vector y = oracle::random_vector(rng, op.m());
      const double lhs = op.forward(x).dot(y);
      const double rhs = x.dot(op.adjoint(y));
      worst_adj = std::max(worst_adj, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
  };
  auto [rmc_prog, rmc_inst] = gen_rmc(14, 2, 60, 5, 1.0, 31);
  adjoint_err(rmc_prog.constraints);
  const std::string path = "/tmp/lrsdp_acceptance_roundtrip.lrsdp";
  save_problem(path, rmc_prog);
  const ConicProgram loaded = load_problem(path);
  std::remove(path.c_str());
  adjoint_err(loaded.constraints);
  c.require(worst_adj <= 1e-10, "adjoint deviation " + std::to_string(worst_adj));

  char buf[128];
  std::snprintf(buf, sizeof(buf), "Gram err %.2e, adjoint err %.2e", worst_gram, worst_adj);
  c.note(buf);
  return c;
}

Check criterion3() {
  Check c;
  Rng rng(1003);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 30, r = 6;
    const Matrix A = oracle::random_spd(rng, n, 1.0, 2.0);
    const Matrix C = oracle::random_spd(rng, r, 1.0, 2.0);
    Matrix B(n, r);
    for (Eigen::Index i = 0; i < n * r; ++i) B(i / r, i % r) = rng.normal();
    B /= spectral_norm(Matrix(B.transpose() * B));
    const Matrix P = A + 0.5 * Matrix::Identity(n, n);
    const Vector f = oracle::random_vector(rng, n);
    const Vector g = oracle::random_vector(rng, r);
    const Vector x0 = oracle::random_vector(rng, n);

    Matrix K(n + r, n + r), Pk(n + r, n + r);
    K << A, B, B.transpose(), -C;
    Pk << P, B, B.transpose(), -C;
    const Eigen::PartialPivLU<Matrix> Pk_lu(Pk);
    const Eigen::LLT<Matrix> C_llt(C);
    Vector fg(n + r);
    fg << f, g;
    Vector z0(n + r);
    z0 << x0, C_llt.solve(B.transpose() * x0 - g);

    std::vector<Vector> indef, schur;
    KrylovOptions kopts;
    kopts.tol = 0.0;
    kopts.max_iter = 15;
    kopts.iterate_observer = [&](Eigen::Index, const Vector& x) { indef.push_back(x); };
    pcg(LinearOperator::from_matrix(K), fg,
        LinearOperator{n + r, [&](const Vector& v) { return Vector(Pk_lu.solve(v)); }}, z0, kopts);

    const Matrix S = A + B * C_llt.solve(B.transpose());
    const Matrix Ps = P + B * C_llt.solve(B.transpose());
    const Eigen::LLT<Matrix> Ps_llt(Ps);
    kopts.iterate_observer = [&](Eigen::Index, const Vector& x) { schur.push_back(x); };
    pcg(LinearOperator::from_matrix(S), f + B * C_llt.solve(g),
        LinearOperator{n, [&](const Vector& v) { return Vector(Ps_llt.solve(v)); }}, x0, kopts);

    for (std::size_t k = 0; k < std::min(indef.size(), schur.size()); ++k) {
      const Vector& xk = schur[k];
      const Vector vk = C_llt.solve(B.transpose() * xk - g);
      worst = std::max(worst, (indef[k].head(n) - xk).norm() / std::max(1.0, xk.norm()));
      worst = std::max(worst, (indef[k].tail(r) - vk).norm() / std::max(1.0, vk.norm()));
    }
  }
  c.require(worst <= 1e-8, "iterate deviation " + std::to_string(worst));
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max iterate deviation %.2e", worst);
  c.note(buf);
  return c;
}

Check criterion4() {
  Check c;
  Rng rng(1004);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 8, m = 10;
    const ConeLayout layout{0, n};
    Matrix Ad(m, layout.svec_dim());
    for (Eigen::Index i = 0; i < Ad.size(); ++i) Ad(i / Ad.cols(), i % Ad.cols()) = rng.normal();
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index i = 0; i < Ad.rows(); ++i)
      for (Eigen::Index j = 0; j < Ad.cols(); ++j) trips.emplace_back(i, j, Ad(i, j));
    Eigen::SparseMatrix<double, Eigen::RowMajor> Asp(m, layout.total_dim());
    Asp.setFromTriplets(trips.begin(), trips.end());
    const ConstraintOperator cop(layout, std::move(Asp));

    const Matrix W = oracle::random_spd(rng, n, 0.2, 3.0);
    const NtScaling scaling = oracle::scaling_from_w(W);
    const ScalingDecomposition dec = build(scaling, 2);
    const AugmentedSystem sys{&cop, &dec};
    const double tau2 = dec.tau * dec.tau;

    NewtonRhs rhs;
    rhs.b_tilde = oracle::random_vector(rng, m);
    rhs.c_tilde = oracle::random_vector(rng, layout.total_dim());
    Vector uv(sys.dim());
    uv << oracle::random_vector(rng, m), oracle::random_vector(rng, dec.d_total());
    const Vector resid = apply_augmented(sys, uv) - build_rhs(sys, rhs);

    NewtonDirection dir;
    dir.dy = uv.head(m) / tau2;
    dir.dX = apply_E_full(dec, cop.adjoint(uv.head(m)) - tau2 * rhs.c_tilde) +
             apply_Q_full(dec, uv.tail(dec.d_total()));
    const Matrix Winv = psd_power(scaling.eig_W, -1.0);
    const Vector kkt_dual =
        -svec(symmetrize(Winv * smat(dir.dX) * Winv)) + cop.adjoint(dir.dy) - rhs.c_tilde;
    const Vector kkt_primal = cop.forward(dir.dX) - rhs.b_tilde;

    const Matrix Qop = oracle::q_matrix(dec.Q, dec.Qperp);
    const Matrix Einv_op = oracle::skron(dec.E.inverse(), dec.E.inverse());
    const Matrix Cmat = Matrix((tau2 * dec.SigmaInv.cwiseInverse()).asDiagonal()) +
                        Qop.transpose() * Einv_op * Qop;
    const Vector expect_dual = Einv_op * (Qop * Cmat.llt().solve(resid.tail(dec.d_total()))) / tau2;
    worst = std::max(worst,
                     (kkt_dual - expect_dual).norm() / std::max(1.0, expect_dual.norm()));
    worst = std::max(worst, (kkt_primal - resid.head(m)).norm() /
                                std::max(1.0, resid.head(m).norm()));
  }
  c.require(worst <= 1e-8, "propagation deviation " + std::to_string(worst));
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max residual-propagation deviation %.2e", worst);
  c.note(buf);
  return c;
}

Check criterion5() {
  Check c;
  Rng rng(1005);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 8 + static_cast<Eigen::Index>(rng.uniform_int(13));  // <= 20
    const Eigen::Index l = trial % 2 == 0 ? 0 : 1 + static_cast<Eigen::Index>(rng.uniform_int(6));
    const ConeLayout layout{l, n};
    // keep the rows independent: m stays below the primal dimension
    const Eigen::Index m_cap = std::min<Eigen::Index>(60, layout.total_dim() - 1);
    const Eigen::Index m =
        20 + static_cast<Eigen::Index>(rng.uniform_int(static_cast<std::uint64_t>(m_cap - 19)));
    Matrix Ad(m, layout.total_dim());
    for (Eigen::Index i = 0; i < Ad.size(); ++i) Ad(i / Ad.cols(), i % Ad.cols()) = rng.normal();
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index i = 0; i < Ad.rows(); ++i)
      for (Eigen::Index j = 0; j < Ad.cols(); ++j) trips.emplace_back(i, j, Ad(i, j));
    Eigen::SparseMatrix<double, Eigen::RowMajor> Asp(m, layout.total_dim());
    Asp.setFromTriplets(trips.begin(), trips.end());
    const ConstraintOperator cop(layout, std::move(Asp));

    Vector w_lp(l);
    for (Eigen::Index i = 0; i < l; ++i) w_lp[i] = 0.05 + 2.0 * rng.uniform();
    const Matrix W = oracle::random_spd(rng, n, 0.1, 3.0);
    const NtScaling scaling = oracle::scaling_from_w(W, w_lp);
    const ScalingDecomposition dec =
        build(scaling, 1 + static_cast<Eigen::Index>(rng.uniform_int(3)));
    const AugmentedSystem sys{&cop, &dec};

    NewtonRhs rhs;
    rhs.b_tilde = oracle::random_vector(rng, m);
    rhs.c_tilde = oracle::random_vector(rng, layout.total_dim());

    const Eigen::Index total = layout.total_dim();
    Matrix D = Matrix::Zero(total, total);
    D.topLeftCorner(l, l) = Matrix(w_lp.cwiseAbs2().asDiagonal());
    D.bottomRightCorner(layout.svec_dim(), layout.svec_dim()) = oracle::scaling_matrix(W);
    Matrix K = Matrix::Zero(total + m, total + m);
    K.topLeftCorner(total, total) = -D.inverse();
    K.topRightCorner(total, m) = Ad.transpose();
    K.bottomLeftCorner(m, total) = Ad;
    Vector kkt_rhs(total + m);
    kkt_rhs << rhs.c_tilde, rhs.b_tilde;
    const Vector exact = K.fullPivLu().solve(kkt_rhs);

    NewtonSolveOptions nopts;
    nopts.tol = 1e-12 * std::max(1.0, kkt_rhs.norm());
    nopts.method = trial % 3 == 0 ? NewtonMethod::Minres : NewtonMethod::Pcg;
    const NewtonDirection dir = solve_newton(sys, rhs, nopts);
    worst = std::max(worst, (dir.dX - exact.head(total)).norm() /
                                std::max(1.0, exact.head(total).norm()));
    worst = std::max(worst,
                     (dir.dy - exact.tail(m)).norm() / std::max(1.0, exact.tail(m).norm()));
  }
  c.require(worst <= 1e-7, "direction deviation " + std::to_string(worst));
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max deviation from dense KKT %.2e", worst);
  c.note(buf);
  return c;
}

Check criterion6() {
  Check c;
  const auto t0 = clock_t_::now();
  // stated sweep 1e-2 .. 1e-10 plus a finite-precision tail
  std::vector<double> grid;
  for (int k = 2; k <= 13; ++k) grid.push_back(std::pow(10.0, -k));
  const auto rows = condition_study(24, grid, 77);

  double aug_min = std::numeric_limits<double>::infinity(), aug_max = 0.0;
  double kkt_at_1e2 = 0.0, kkt_at_1e10 = 0.0, kkt_max = 0.0;
  for (const auto& row : rows) {
    if (row.mu >= 1e-10) {  // the stated grid
      aug_min = std::min(aug_min, row.cond_aug);
      aug_max = std::max(aug_max, row.cond_aug);
    }
    if (row.mu == 1e-2) kkt_at_1e2 = row.cond_kkt;
    if (row.mu == 1e-10) kkt_at_1e10 = row.cond_kkt;
    kkt_max = std::max(kkt_max, row.cond_kkt);
  }
  c.require(aug_max / aug_min <= 100.0,
            "cond(aug) variation " + std::to_string(aug_max / aug_min));
  c.require(kkt_at_1e10 / kkt_at_1e2 >= 1e4, "cond(KKT) growth too small");
  // finite precision keeps the measured KKT condition stuck below ~1e25
  c.require(kkt_max <= 1e26, "cond(KKT) exceeded the finite-precision ceiling");
  const double tail_growth = rows.back().cond_kkt / rows[rows.size() - 3].cond_kkt;
  c.require(tail_growth < 100.0, "cond(KKT) still growing at the tail");
  const double elapsed = seconds_since(t0);
  c.require(elapsed < 120.0, "runtime " + std::to_string(elapsed) + " s");
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "aug var %.1fx, KKT growth %.1e, KKT saturation %.1e, %.0f s",
                aug_max / aug_min, kkt_at_1e10 / kkt_at_1e2, kkt_max, elapsed);
  c.note(buf);
  return c;
}

Check criterion7() {
  Check c;
  const SolvedInstance& s = table1_row1();
  const double err = reconstruction_error(s.res.X.psd, s.inst);
  c.require(s.res.status == IpmStatus::Solved, "solver status not Solved");
  c.require(err <= 1e-8, "reconstruction error " + std::to_string(err));
  c.require(s.res.mu <= 1e-11, "final mu " + std::to_string(s.res.mu));
  c.require(s.res.cumulative_inner() <= 5 * 1038, "cumulative inner iterations");
  c.require(s.wall_s < 300.0, "wall time " + std::to_string(s.wall_s));
  char buf[160];
  std::snprintf(buf, sizeof(buf), "err %.1e, mu %.1e, cum inner %ld (budget 5190), %.0f s",
                err, s.res.mu, static_cast<long>(s.res.cumulative_inner()), s.wall_s);
  c.note(buf);
  return c;
}

Check criterion8() {
  Check c;
  const auto check_one = [&](Eigen::Index m, Eigen::Index mo, std::uint64_t seed,
                             const IpmResult* pre) {
    IpmResult local;
    const IpmResult* res = pre;
    if (res == nullptr) {
      auto [prog, inst] = gen_rmc(50, 2, m, mo, 1.0, seed);
      local = solve(prog, {});
      res = &local;
    }
    bool pcg_effective = true;
    for (const auto& row : res->log)
      if (!row.pcg_ok) pcg_effective = false;
    const std::string tag = "m=" + std::to_string(m);
    c.require(res->status == IpmStatus::Solved, tag + " not solved");
    c.require(res->mu <= 1e-11, tag + " final mu too large");
    c.require(pcg_effective, tag + " PCG needed a fallback");
  };
  check_one(800, 6, 2024, &table1_row1().res);
  check_one(1000, 12, 2025, nullptr);
  check_one(1200, 24, 2026, nullptr);
  c.note("three n=50 instances solved to mu <= 1e-11 with PCG throughout");
  return c;
}

Check criterion9() {
  Check c;
  const std::vector<Eigen::Index> grid{50, 100, 200, 400};
  const auto linear = scaling_study(grid, false, 33);
  const auto quad = scaling_study(grid, true, 33);
  const double s_setup_lin = loglog_slope(linear, true);
  const double s_iter_lin = loglog_slope(linear, false);
  const double s_setup_quad = loglog_slope(quad, true);
  const double s_iter_quad = loglog_slope(quad, false);
  for (const double s : {s_setup_lin, s_iter_lin, s_setup_quad, s_iter_quad})
    c.require(s >= 2.5 && s <= 3.5, "slope " + std::to_string(s) + " outside [2.5, 3.5]");
  c.require(std::abs(s_setup_lin - s_setup_quad) < 0.4, "setup slopes differ across m-modes");
  c.require(std::abs(s_iter_lin - s_iter_quad) < 0.4, "per-iter slopes differ across m-modes");
  char buf[160];
  std::snprintf(buf, sizeof(buf), "slopes setup %.2f/%.2f, per-iter %.2f/%.2f (linear/quadratic m)",
                s_setup_lin, s_setup_quad, s_iter_lin, s_iter_quad);
  c.note(buf);
  return c;
}

Check criterion10() {
  Check c;
  const SolvedInstance& s = table1_row1();
  const auto rows = krylov_compare(s.prog, {2, 5, 10}, 1e-10, &s.res);
  Eigen::Index prev_pcg = std::numeric_limits<Eigen::Index>::max();
  std::string summary;
  for (const auto& row : rows) {
    const auto pcg_iters = static_cast<Eigen::Index>(row.pcg_history.size()) - 1;
    const auto minres_iters = static_cast<Eigen::Index>(row.minres_history.size()) - 1;
    c.require(row.pcg_converged, "PCG unconverged at r=" + std::to_string(row.r));
    c.require(pcg_iters < minres_iters, "PCG not faster at r=" + std::to_string(row.r));
    c.require(pcg_iters <= prev_pcg, "PCG iterations increased with r");
    prev_pcg = pcg_iters;
    summary += " r=" + std::to_string(row.r) + ":" + std::to_string(pcg_iters) + "/" +
               std::to_string(minres_iters);
  }
  c.note("pcg/minres iterations" + summary);
  return c;
}

Check criterion11() {
  Check c;
  const SolvedInstance& s = table1_row1();
  const Matrix X_star = s.inst.X_star;
  const Matrix S_star = s.res.S.psd;  // converged dual as the reference

  double delta_max = 0.0, L_max = 0.0, chi2_max = 0.0;
  int evaluated = 0;
  for (const auto& pt : s.res.trajectory) {
    const double mu_protocol = mu_for_centrality(pt.X, pt.S, 0.1);
    if (mu_protocol > 1.0) continue;  // the assumptions are stated for mu <= 1
    const AssumptionReport rep =
        diagnostics(s.prog.constraints, pt.X, pt.S, 5, &X_star, &S_star);
    delta_max = std::max(delta_max, rep.delta_hat);
    if (rep.L_X) L_max = std::max(L_max, *rep.L_X);
    if (rep.L_S) L_max = std::max(L_max, *rep.L_S);
    chi2_max = std::max(chi2_max, rep.chi2_hat);
    ++evaluated;
  }
  c.require(evaluated >= 5, "too few trajectory points below mu = 1");
  c.require(delta_max <= 0.9 * 2, "delta " + std::to_string(delta_max));
  c.require(L_max <= 10.0 * 2, "L " + std::to_string(L_max));
  c.require(chi2_max <= 2.7 * 2, "chi2 " + std::to_string(chi2_max));
  char buf[128];
  std::snprintf(buf, sizeof(buf), "delta %.2f (<=1.8), L %.2f (<=20), chi2 %.2f (<=5.4), %d pts",
                delta_max, L_max, chi2_max, evaluated);
  c.note(buf);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  tune_allocator();
  const std::pair<const char*, std::function<Check()>> criteria[] = {
      {"decomposition exactness", criterion1},
      {"isometry and adjoint suites", criterion2},
      {"indefinite-PCG / Schur-PCG equivalence", criterion3},
      {"residual propagation oracle", criterion4},
      {"Newton-direction correctness", criterion5},
      {"conditioning boundedness", criterion6},
      {"end-to-end accuracy (n=50, m=800, 6 outliers)", criterion7},
      {"high-accuracy persistence (three n=50 instances)", criterion8},
      {"cubic scaling", criterion9},
      {"Krylov comparison", criterion10},
      {"assumption diagnostics", criterion11},
  };

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  for (int k = 0; k < 11; ++k) {
    if (only != 0 && only != k + 1) continue;
    Check c;
    try {
      c = criteria[k].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.note(std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %2d: %s%s%s\n", c.ok ? "PASS" : "FAIL", k + 1, criteria[k].first,
                c.detail.empty() ? "" : " -- ", c.detail.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
  }
  return failures;
}
