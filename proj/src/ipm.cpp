#include "lrsdp/ipm.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

namespace lrsdp {

namespace {

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::Index effective_r_hat(const IpmOptions& opts, Eigen::Index n) {
  Eigen::Index r = opts.r_hat;
  if (r <= 0) r = std::min<Eigen::Index>(std::max<Eigen::Index>(n / 10, 1), 15);
  return std::min(r, n - 1);
}

// Solve (V M + M V) / 2 = K for M, with V given by its eigendecomposition.
Matrix lyapunov_solve(const EigenDecomposition& V, const Matrix& K) {
  const Matrix Kh = V.vectors.transpose() * K * V.vectors;
  Matrix Mh(Kh.rows(), Kh.cols());
  for (Eigen::Index i = 0; i < Kh.rows(); ++i)
    for (Eigen::Index j = 0; j < Kh.cols(); ++j)
      Mh(i, j) = 2.0 * Kh(i, j) / (V.values[i] + V.values[j]);
  return symmetrize(V.vectors * Mh * V.vectors.transpose());
}

struct SolveAttempt {
  NewtonDirection dir;
  Eigen::Index total_inner = 0;
  bool usable = false;
  bool fell_back = false;  // the MINRES fallback had to run
};

// One Newton solve with MINRES fallback when the PCG path fails to produce a
// usable direction.
SolveAttempt solve_with_fallback(const AugmentedSystem& sys, const NewtonRhs& rhs,
                                 const KrylovConfig& cfg, double beta,
                                 const SchurPreconditioner* prec, double rhs_floor) {
  const Vector aug_rhs = build_rhs(sys, rhs);
  const double scale = std::max(1.0, aug_rhs.norm());
  NewtonSolveOptions nopts;
  nopts.beta = beta;
  nopts.tol = std::max(cfg.tol_rel * aug_rhs.norm(), rhs_floor);
  nopts.max_iter = cfg.cap;
  nopts.method = cfg.method;
  nopts.prec = cfg.method == NewtonMethod::Pcg ? prec : nullptr;

  SolveAttempt out;
  bool threw = false;
  try {
    out.dir = solve_newton(sys, rhs, nopts);
    out.total_inner = out.dir.iterations;
    out.usable = out.dir.aug_residual <= 1e-4 * scale;
  } catch (const std::runtime_error&) {
    threw = true;
  }
  if ((threw || !out.usable) && cfg.method == NewtonMethod::Pcg) {
    out.fell_back = true;
    nopts.method = NewtonMethod::Minres;
    nopts.prec = nullptr;
    NewtonDirection alt = solve_newton(sys, rhs, nopts);
    out.total_inner += alt.iterations;
    if (threw || alt.aug_residual < out.dir.aug_residual) out.dir = std::move(alt);
    out.usable = out.dir.aug_residual <= 1e-4 * scale;
  } else if (threw) {
    throw NumericalFailure("solve_with_fallback: augmented solve failed");
  }
  return out;
}

}  // namespace

namespace {

// Complementarity residual r_c = sigma mu S^{-1} - X [- Mehrotra term], flat.
Vector complementarity_residual(const ConeLayout& layout, const ConePoint& X, const ConePoint& S,
                                const NtScaling& scaling, double sigma, double mu,
                                const Vector* dX_aff, const Vector* dS_aff) {
  const Eigen::Index l = layout.lp_dim;
  const EigenDecomposition es = eig_sym(S.psd);
  if (es.values.minCoeff() <= 0.0)
    throw NotInteriorPoint("newton_rhs: S not positive definite");
  Matrix rc_psd = sigma * mu * psd_power(es, -1.0) - X.psd;
  Vector rc_lp(l);
  for (Eigen::Index i = 0; i < l; ++i) {
    if (S.lp[i] <= 0.0) throw NotInteriorPoint("newton_rhs: LP dual not interior");
    rc_lp[i] = sigma * mu / S.lp[i] - X.lp[i];
  }

  if (dX_aff != nullptr && dS_aff != nullptr) {
    // Mehrotra correction in the NT-scaled space: with V = W^{-1/2} X W^{-1/2}
    // and hatted affine steps, r_c gains
    //   -W^{1/2} lyap_V(sym(dXh dSh)) W^{1/2},
    // which reduces to -dx ds / s on the LP block.
    const Matrix dXh = congruence_power(scaling.eig_W, smat(dX_aff->tail(layout.svec_dim())), -0.5);
    const Matrix dSh = congruence_power(scaling.eig_W, smat(dS_aff->tail(layout.svec_dim())), 0.5);
    const Matrix K = symmetrize(dXh * dSh);
    const EigenDecomposition ev = eig_sym(congruence_power(scaling.eig_W, X.psd, -0.5));
    rc_psd -= congruence_power(scaling.eig_W, lyapunov_solve(ev, K), 0.5);
    rc_lp -= dX_aff->head(l).cwiseProduct(dS_aff->head(l)).cwiseQuotient(S.lp);
  }

  Vector rc(layout.total_dim());
  rc.head(l) = rc_lp;
  rc.tail(layout.svec_dim()) = svec(rc_psd);
  return rc;
}

NewtonRhs rhs_from_rc(const ConicProgram& prog, const ConePoint& X, const Vector& y,
                      const ConePoint& S, const NtScaling& scaling, const Vector& rc) {
  const ConeLayout& layout = prog.layout;
  const Eigen::Index l = layout.lp_dim;
  NewtonRhs rhs;
  rhs.b_tilde = prog.b - prog.constraints.forward(X.flat());
  const Vector dual_res = prog.cost - S.flat() - prog.constraints.adjoint(y);

  // c~ = dual residual - (W (x)_s W)^{-1} r_c
  rhs.c_tilde.resize(layout.total_dim());
  rhs.c_tilde.head(l) = dual_res.head(l) - rc.head(l).cwiseQuotient(scaling.w_lp.cwiseAbs2());
  rhs.c_tilde.tail(layout.svec_dim()) =
      dual_res.tail(layout.svec_dim()) -
      svec(congruence_power(scaling.eig_W, smat(rc.tail(layout.svec_dim())), -1.0));
  if (!rhs.c_tilde.allFinite() || !rhs.b_tilde.allFinite())
    throw NumericalFailure("newton_rhs: non-finite residuals");
  return rhs;
}

}  // namespace

NewtonRhs newton_rhs(const ConicProgram& prog, const ConePoint& X, const Vector& y,
                     const ConePoint& S, const NtScaling& scaling, double sigma, double mu,
                     const Vector* dX_aff, const Vector* dS_aff) {
  const Vector rc =
      complementarity_residual(prog.layout, X, S, scaling, sigma, mu, dX_aff, dS_aff);
  return rhs_from_rc(prog, X, y, S, scaling, rc);
}

double boundary_alpha(const ConePoint& point, const ConePoint& direction) {
  double alpha = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < point.lp.size(); ++i)
    if (direction.lp[i] < 0.0) alpha = std::min(alpha, -point.lp[i] / direction.lp[i]);
  if (point.psd.rows() > 0) {
    // X + a D >= 0 iff I + a X^{-1/2} D X^{-1/2} >= 0
    const EigenDecomposition ex = eig_sym(point.psd);
    if (ex.values.minCoeff() <= 0.0) throw NotInteriorPoint("boundary_alpha: point not interior");
    Eigen::SelfAdjointEigenSolver<Matrix> es(congruence_power(ex, direction.psd, -0.5),
                                             Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

double max_step(const ConePoint& point, const ConePoint& direction, double step_fraction) {
  return std::min(1.0, step_fraction * boundary_alpha(point, direction));
}

IpmResult solve(const ConicProgram& prog, const IpmOptions& opts) {
  const ConeLayout& layout = prog.layout;
  const Eigen::Index n = layout.psd_order;
  const Eigen::Index l = layout.lp_dim;
  const Eigen::Index r_hat = effective_r_hat(opts, n);

  const double rho_p = 1.0 + prog.b.cwiseAbs().maxCoeff();
  const double rho_d = 1.0 + prog.cost.norm();

  IpmResult res;
  res.X = ConePoint::Identity(layout, rho_p, rho_p);
  res.S = ConePoint::Identity(layout, rho_d, rho_d);
  res.y = Vector::Zero(prog.constraints.m());
  res.status = IpmStatus::MaxIterations;

  const double b_scale = 1.0 + prog.b.norm();
  const double c_scale = 1.0 + prog.cost.norm();
  const double rhs_floor = 1e-15 * std::max(b_scale, c_scale);
  Eigen::Index cum_inner = 0;
  int consecutive_failures = 0;
  int consecutive_stalls = 0;

  for (int iter = 0; iter < opts.max_outer; ++iter) {
    const Vector x_flat = res.X.flat();
    const Vector s_flat = res.S.flat();
    res.mu = duality_mu(res.X, res.S);
    res.feas_p = (prog.constraints.forward(x_flat) - prog.b).norm() / b_scale;
    res.feas_d = (prog.constraints.adjoint(res.y) + s_flat - prog.cost).norm() / c_scale;
    if (res.mu <= opts.tol_mu && res.feas_p <= opts.tol_feas && res.feas_d <= opts.tol_feas) {
      res.status = IpmStatus::Solved;
      break;
    }

    try {
    IterationRow row;
    row.iter = iter;
    row.mu = res.mu;
    row.feas_p = res.feas_p;
    row.feas_d = res.feas_d;
    row.centrality = centrality(res.X, res.S, res.mu);

    const auto t_setup = std::chrono::steady_clock::now();
    const NtScaling scaling = nt_scaling(res.X, res.S);
    Eigen::Index r = n == 1 ? 0 : select_rank(scaling.eig_W.values, r_hat);
    ScalingDecomposition dec;
    while (true) {
      try {
        dec = build(scaling, r);
        break;
      } catch (const DegenerateSpectrum&) {
        if (--r < 1) throw;
      }
    }
    row.r = r;
    row.tau = dec.tau;

    if (opts.record_trajectory)
      res.trajectory.push_back(TrajectoryPoint{res.X, res.S, res.y, res.mu, r, dec.Q});

    const AugmentedSystem sys{&prog.constraints, &dec};
    KrylovConfig cfg = opts.krylov;
    SchurPreconditioner prec;
    if (cfg.method == NewtonMethod::Pcg) {
      try {
        prec = build_preconditioner(sys, opts.beta);
      } catch (const PreconditionerFailure&) {
        cfg.method = NewtonMethod::Minres;
      }
    }
    row.setup_s = elapsed_s(t_setup);

    const auto t_krylov = std::chrono::steady_clock::now();

    // Predictor (affine scaling, sigma = 0).
    const Vector rc_aff =
        complementarity_residual(layout, res.X, res.S, scaling, 0.0, res.mu, nullptr, nullptr);
    const NewtonRhs rhs_aff = rhs_from_rc(prog, res.X, res.y, res.S, scaling, rc_aff);
    SolveAttempt aff = solve_with_fallback(sys, rhs_aff, cfg, opts.beta, &prec, rhs_floor);
    row.inner_pred = aff.total_inner;

    const Vector dual_res = prog.cost - s_flat - prog.constraints.adjoint(res.y);
    ConePoint dX_aff = ConePoint::from_flat(layout, aff.dir.dX);
    ConePoint dS_aff =
        ConePoint::from_flat(layout, dual_res - prog.constraints.adjoint(aff.dir.dy));

    const double ap_aff = std::min(1.0, boundary_alpha(res.X, dX_aff));
    const double ad_aff = std::min(1.0, boundary_alpha(res.S, dS_aff));
    const Vector dx_aff_flat = dX_aff.flat();
    const Vector ds_aff_flat = dS_aff.flat();
    const double gap_aff = (x_flat + ap_aff * dx_aff_flat).dot(s_flat + ad_aff * ds_aff_flat);
    const double mu_aff = std::max(gap_aff, 0.0) / static_cast<double>(n + l);
    const double sigma = std::min(1.0, std::max(1e-8, std::pow(mu_aff / res.mu, 3)));

    // Corrector with the second-order term; one preconditioner per iteration.
    const Vector rc_corr = complementarity_residual(layout, res.X, res.S, scaling, sigma, res.mu,
                                                    &dx_aff_flat, &ds_aff_flat);
    const NewtonRhs rhs_corr = rhs_from_rc(prog, res.X, res.y, res.S, scaling, rc_corr);
    SolveAttempt corr = solve_with_fallback(sys, rhs_corr, cfg, opts.beta, &prec, rhs_floor);
    row.inner_corr = corr.total_inner;
    corr.dir.kkt_residual = kkt_residual_check(scaling, prog.constraints, corr.dir, rhs_corr);
    row.pcg_ok = cfg.method == NewtonMethod::Pcg && aff.usable && corr.usable &&
                 !aff.fell_back && !corr.fell_back;

    if (!aff.usable || !corr.usable) {
      if (++consecutive_failures >= 2) {
        res.status = IpmStatus::NumericalFailure;
        row.krylov_s = elapsed_s(t_krylov);
        cum_inner += row.inner_pred + row.inner_corr;
        row.cum_inner = cum_inner;
        res.log.push_back(row);
        break;
      }
    } else {
      consecutive_failures = 0;
    }

    ConePoint dX = ConePoint::from_flat(layout, corr.dir.dX);
    ConePoint dS =
        ConePoint::from_flat(layout, dual_res - prog.constraints.adjoint(corr.dir.dy));
    double alpha_p = max_step(res.X, dX, opts.step_fraction);
    double alpha_d = max_step(res.S, dS, opts.step_fraction);
    row.krylov_s = elapsed_s(t_krylov);

    // Guard against boundary grazing from rounding.
    ConePoint X_next, S_next;
    for (int t = 0;; ++t) {
      X_next.lp = res.X.lp + alpha_p * dX.lp;
      X_next.psd = res.X.psd + alpha_p * dX.psd;
      if (X_next.min_eig() > 0.0) break;
      alpha_p *= 0.5;
      if (t > 60) throw NumericalFailure("solve: cannot keep primal iterate interior");
    }
    for (int t = 0;; ++t) {
      S_next.lp = res.S.lp + alpha_d * dS.lp;
      S_next.psd = res.S.psd + alpha_d * dS.psd;
      if (S_next.min_eig() > 0.0) break;
      alpha_d *= 0.5;
      if (t > 60) throw NumericalFailure("solve: cannot keep dual iterate interior");
    }
    res.X = std::move(X_next);
    res.S = std::move(S_next);
    res.y += alpha_d * corr.dir.dy;

    cum_inner += row.inner_pred + row.inner_corr;
    row.cum_inner = cum_inner;
    res.log.push_back(row);

    if (opts.verbose) {
      std::cout << "iter " << iter << "  mu " << row.mu << "  feas_p " << row.feas_p
                << "  feas_d " << row.feas_d << "  r " << row.r << "  sigma " << sigma
                << "  inner " << row.inner_pred << "+" << row.inner_corr << "  alpha "
                << alpha_p << "/" << alpha_d << "\n";
    }

    // No measurable progress means the numerical floor: stop with what we have.
    const bool tiny_steps = std::max(alpha_p, alpha_d) < 1e-10;
    const bool mu_stuck =
        res.log.size() >= 6 &&
        res.log.back().mu > 0.5 * res.log[res.log.size() - 6].mu;
    if (tiny_steps || mu_stuck) {
      if (++consecutive_stalls >= (tiny_steps ? 2 : 4)) {
        res.status = IpmStatus::NumericalFailure;
        break;
      }
    } else {
      consecutive_stalls = 0;
    }
    } catch (const InvalidDimension&) {
      throw;
    } catch (const std::runtime_error&) {
      // numerical breakdown inside the iteration: report with a partial log
      res.status = IpmStatus::NumericalFailure;
      break;
    }
  }

  res.objective = prog.cost.dot(res.X.flat());
  return res;
}

double mu_for_centrality(const ConePoint& X, const ConePoint& S, double target) {
  // Spectrum of the products that enter the centrality measure.
  std::vector<double> spectrum;
  for (Eigen::Index i = 0; i < X.lp.size(); ++i) spectrum.push_back(X.lp[i] * S.lp[i]);
  if (X.psd.rows() > 0) {
    const EigenDecomposition ex = eig_sym(X.psd);
    if (ex.values.minCoeff() <= 0.0) throw NotInteriorPoint("mu_for_centrality: X not interior");
    Eigen::SelfAdjointEigenSolver<Matrix> es(congruence_power(ex, S.psd, 0.5), Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      spectrum.push_back(es.eigenvalues()[i]);
  }
  const double m_max = *std::max_element(spectrum.begin(), spectrum.end());
  const double m_min = *std::min_element(spectrum.begin(), spectrum.end());

  // centrality(mu) = max(m_max/mu - 1, 1 - m_min/mu); pick the root of either
  // branch when the other stays below target, else the minimizer.
  const double mu_hi = m_max / (1.0 + target);
  if (1.0 - m_min / mu_hi <= target + 1e-12) return mu_hi;
  if (target < 1.0) {
    const double mu_lo = m_min / (1.0 - target);
    if (m_max / mu_lo - 1.0 <= target + 1e-12) return mu_lo;
  }
  return 0.5 * (m_max + m_min);
}

AssumptionReport diagnostics(const ConstraintOperator& constraints, const ConePoint& X,
                             const ConePoint& S, Eigen::Index r_hat,
                             const Matrix* X_star, const Matrix* S_star) {
  AssumptionReport rep;
  rep.mu = mu_for_centrality(X, S, 0.1);
  // intrinsic centrality of the pair: the minimum over mu, zero iff the pair
  // sits exactly on the central path
  rep.delta_hat = centrality(X, S, mu_for_centrality(X, S, 0.0));
  if (X_star != nullptr) rep.L_X = spectral_norm(X.psd - *X_star) / rep.mu;
  if (S_star != nullptr) rep.L_S = spectral_norm(S.psd - *S_star);

  const NtScaling scaling = nt_scaling(X, S);
  const Eigen::Index n = X.psd.rows();
  Eigen::Index r = n == 1 ? 0 : select_rank(scaling.eig_W.values, std::min(r_hat, n - 1));
  ScalingDecomposition dec;
  while (true) {
    try {
      dec = build(scaling, r);
      break;
    } catch (const DegenerateSpectrum&) {
      if (--r < 1) throw;
    }
  }
  rep.r = r;
  if (dec.d_psd() == 0) {
    rep.chi2_hat = 1.0;
    return rep;
  }

  // chi2_hat^{-1} = sigma_min((A A')^{-1/2} A Q_op) over the PSD tangent
  // columns, computed densely (desk scale).
  const ConeLayout& layout = constraints.layout();
  const Eigen::Index d = dec.d_psd();
  Matrix AQ(constraints.m(), d);
  Vector e = Vector::Zero(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    e[k] = 1.0;
    Vector full = Vector::Zero(layout.total_dim());
    full.tail(layout.svec_dim()) = apply_Q(dec, e);
    AQ.col(k) = constraints.forward(full);
    e[k] = 0.0;
  }
  const Matrix AAt = Matrix(constraints.matrix() * constraints.matrix().transpose());
  const Matrix G = AQ.transpose() * Eigen::LLT<Matrix>(AAt).solve(AQ);
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(G), Eigen::EigenvaluesOnly);
  const double lmin = std::max(es.eigenvalues().minCoeff(), 0.0);
  rep.chi2_hat = lmin > 0.0 ? 1.0 / std::sqrt(lmin) : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace lrsdp
