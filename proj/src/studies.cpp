#include "lrsdp/studies.hpp"

#include <Eigen/SVD>
#include <chrono>
#include <cmath>

#include "lrsdp/runtime.hpp"

namespace lrsdp {

namespace {

double spectral_cond(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& s = svd.singularValues();
  return s[0] / s[s.size() - 1];
}

Matrix dense_from_operator(const LinearOperator& op) {
  Matrix M(op.dim, op.dim);
  Vector e = Vector::Zero(op.dim);
  for (Eigen::Index k = 0; k < op.dim; ++k) {
    e[k] = 1.0;
    M.col(k) = op.apply(e);
    e[k] = 0.0;
  }
  return M;
}

// Synthetic strictly complementary pair with rank-2 X*, scaled so that
// X* + S* <= I as the strict-complementarity assumption requires.
void synthetic_pair(Eigen::Index n, std::uint64_t seed, Matrix& X_star, Matrix& S_star) {
  Rng rng(seed);
  Matrix G(n, 2);
  for (Eigen::Index j = 0; j < 2; ++j)
    for (Eigen::Index i = 0; i < n; ++i) G(i, j) = rng.normal();
  X_star = G * G.transpose();
  X_star *= 0.5 / spectral_norm(X_star);
  const EigenDecomposition ex = eig_sym(X_star);
  const Matrix Qperp = ex.vectors.rightCols(n - 2);
  S_star = 0.5 * Qperp * Qperp.transpose();
}

ConstraintOperator sampling_operator(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  const ConeLayout layout{0, n};
  Rng rng(seed);
  std::vector<Eigen::Index> idx(layout.svec_dim());
  for (Eigen::Index i = 0; i < layout.svec_dim(); ++i) idx[i] = i;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto j =
        i + static_cast<Eigen::Index>(rng.uniform_int(static_cast<std::uint64_t>(idx.size() - i)));
    std::swap(idx[i], idx[j]);
  }
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index i = 0; i < m; ++i) trips.emplace_back(i, idx[i], 1.0);
  Eigen::SparseMatrix<double, Eigen::RowMajor> A(m, layout.total_dim());
  A.setFromTriplets(trips.begin(), trips.end());
  return ConstraintOperator(layout, std::move(A));
}

double time_reps(const std::function<void()>& fn, int min_reps = 3, double min_total = 0.05) {
  using clock = std::chrono::steady_clock;
  int reps = 0;
  const auto t0 = clock::now();
  double total = 0.0;
  while (reps < min_reps || total < min_total) {
    fn();
    ++reps;
    total = std::chrono::duration<double>(clock::now() - t0).count();
    if (reps > 10000) break;
  }
  return total / reps;
}

}  // namespace

std::vector<ConditionRow> condition_study(Eigen::Index n, const std::vector<double>& mu_grid,
                                          std::uint64_t seed) {
  if (n < 8 || n > 60) throw InvalidDimension("condition_study: need 8 <= n <= 60");
  Matrix X_star, S_star;
  synthetic_pair(n, seed, X_star, S_star);
  const ConstraintOperator constraints = sampling_operator(n, 4 * n, seed + 1);
  const Eigen::Index m = constraints.m();
  const Eigen::Index svec_dim = svec_length(n);

  const double chi1 = 1.0 / eig_sym(X_star + S_star).values.minCoeff();
  const Matrix AAt = Matrix(constraints.matrix() * constraints.matrix().transpose());
  const double cond_AAt = spectral_cond(AAt);

  const auto iterates = gen_centered_iterates(X_star, S_star, mu_grid, 0.3, seed + 2);

  std::vector<ConditionRow> rows;
  for (const auto& it : iterates) {
    ConditionRow row;
    row.mu = it.mu;
    row.chi1 = chi1;
    row.cond_AAt = cond_AAt;

    const ConePoint X{Vector(0), it.X}, S{Vector(0), it.S};
    row.delta_hat = centrality(X, S, it.mu);
    row.L_hat = std::max(spectral_norm(it.X - X_star) / it.mu, spectral_norm(it.S - S_star));

    const NtScaling scaling = nt_scaling(X, S);
    const Eigen::Index r = select_rank(scaling.eig_W.values, std::min<Eigen::Index>(5, n - 1));
    const ScalingDecomposition dec = build(scaling, r);
    const AugmentedSystem sys{&constraints, &dec};
    row.cond_aug = spectral_cond(dense_from_operator(sys.as_operator()));

    // Dense scaled-Newton KKT matrix [-(W x W)^{-1}, A'; A, 0].
    const Matrix Winv = psd_power(scaling.eig_W, -1.0);
    Matrix K = Matrix::Zero(svec_dim + m, svec_dim + m);
    Vector e = Vector::Zero(svec_dim);
    for (Eigen::Index k = 0; k < svec_dim; ++k) {
      e[k] = 1.0;
      K.col(k).head(svec_dim) = -svec(symmetrize(Winv * smat(e) * Winv));
      e[k] = 0.0;
    }
    K.topRightCorner(svec_dim, m) = Matrix(constraints.matrix().transpose());
    K.bottomLeftCorner(m, svec_dim) = Matrix(constraints.matrix());
    row.cond_kkt = spectral_cond(K);

    const AssumptionReport rep = diagnostics(constraints, X, S, std::min<Eigen::Index>(5, n - 1));
    row.chi2_hat = rep.chi2_hat;

    // Theorem inputs with G = A E_op A': gamma bounds come from the spectrum of E.
    const double e_max = std::max(1.0, dec.LambdaPerp.maxCoeff() / dec.tau);
    const double e_min = std::min(1.0, dec.LambdaPerp.minCoeff() / dec.tau);
    const double gamma_max = e_max * e_max;
    const double gamma_min = e_min * e_min;
    const double L = std::max(row.L_hat, 1.0);
    const double delta = std::min(row.delta_hat, 0.99);
    row.thm_bound = cond_AAt * std::pow(gamma_max, 4) * std::pow(gamma_min, -8) *
                    std::pow(L, 12) * std::pow(1.0 - delta, -11) * chi1 * chi1 *
                    std::pow(row.chi2_hat, 6);
    rows.push_back(row);
  }
  return rows;
}

std::vector<ScalingRow> scaling_study(const std::vector<Eigen::Index>& n_grid, bool quadratic_m,
                                      std::uint64_t seed) {
  tune_allocator();
  std::vector<ScalingRow> rows;
  for (const Eigen::Index n : n_grid) {
    const Eigen::Index m = quadratic_m ? svec_length(n) : 20 * n;
    auto [prog, inst] = gen_rmc(n, 2, m, 0, 1.0, seed);

    // Centered iterate at a fixed mu. The LP block mimics a late solver
    // state: almost all coordinates inactive (x ~ mu, w small), a constant
    // handful active (x ~ 1, w large).
    Matrix X_star, S_star;
    synthetic_pair(n, seed + 1, X_star, S_star);
    const double mu = 1e-6;
    const auto centered = gen_centered_iterates(X_star, S_star, {mu}, 0.3, seed + 2);
    ConePoint X{Vector::Constant(prog.layout.lp_dim, mu), centered[0].X};
    ConePoint S{Vector::Constant(prog.layout.lp_dim, 1.0), centered[0].S};
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(8, prog.layout.lp_dim); ++i) {
      X.lp[i] = 1.0;
      S.lp[i] = mu;
    }

    ScalingRow row;
    row.n = n;
    row.m = m;

    NtScaling scaling;
    ScalingDecomposition dec;
    SchurPreconditioner prec;
    const ConstraintOperator* cop = &prog.constraints;
    row.setup_s = time_reps([&] {
      scaling = nt_scaling(X, S);
      const Eigen::Index r = select_rank(scaling.eig_W.values, std::min<Eigen::Index>(5, n - 1));
      dec = build(scaling, r);
      const AugmentedSystem sys{cop, &dec};
      prec = build_preconditioner(sys, 3.0);
    });

    const AugmentedSystem sys{cop, &dec};
    Rng rng(seed + 3);
    Vector rhs(sys.dim());
    for (Eigen::Index i = 0; i < rhs.size(); ++i) rhs[i] = rng.normal();
    const LinearOperator A = sys.as_operator();
    const LinearOperator P{sys.dim(),
                           [&](const Vector& fg) { return apply_preconditioner(prec, sys, fg); }};
    const Eigen::Index iters = 12;
    KrylovOptions kopts;
    kopts.tol = 0.0;  // run the full iteration budget
    kopts.max_iter = iters;
    row.periter_s = time_reps([&] { pcg(A, rhs, P, Vector::Zero(sys.dim()), kopts); }, 3, 0.05) /
                    static_cast<double>(iters);
    rows.push_back(row);
  }
  return rows;
}

double loglog_slope(const std::vector<ScalingRow>& rows, bool setup) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto k = static_cast<double>(rows.size());
  for (const auto& row : rows) {
    const double x = std::log(static_cast<double>(row.n));
    const double y = std::log(setup ? row.setup_s : row.periter_s);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

std::vector<KrylovCompareRow> krylov_compare(const ConicProgram& prog,
                                             const std::vector<Eigen::Index>& ranks,
                                             double tol_rel, const IpmResult* presolved) {
  IpmResult local;
  if (presolved == nullptr) {
    local = solve(prog, {});
    presolved = &local;
  }
  const IpmResult& res = *presolved;
  const NtScaling scaling = nt_scaling(res.X, res.S);
  const ConePoint& X = res.X;
  const ConePoint& S = res.S;
  const double mu = duality_mu(X, S);

  std::vector<KrylovCompareRow> rows;
  for (const Eigen::Index r : ranks) {
    const ScalingDecomposition dec = build(scaling, r);
    const AugmentedSystem sys{&prog.constraints, &dec};
    const NewtonRhs rhs = newton_rhs(prog, X, res.y, S, scaling, 0.0, mu);
    const Vector aug_rhs = build_rhs(sys, rhs);
    Vector x0 = Vector::Zero(sys.dim());
    x0.tail(dec.d_total()) =
        -apply_Qt_full(dec, rhs.c_tilde).cwiseProduct(sigma_inv_full(dec));

    KrylovOptions kopts;
    kopts.tol = tol_rel * aug_rhs.norm();
    const LinearOperator A = sys.as_operator();

    KrylovCompareRow row;
    row.r = r;

    kopts.max_iter = 3 * sys.dim();
    const KrylovResult mr = minres(A, aug_rhs, LinearOperator::identity(sys.dim()), x0, kopts);
    row.minres_converged = mr.converged;
    row.minres_history = mr.residual_history;

    const SchurPreconditioner prec = build_preconditioner(sys, 3.0);
    const LinearOperator P{sys.dim(),
                           [&](const Vector& fg) { return apply_preconditioner(prec, sys, fg); }};
    kopts.max_iter = 2000;
    // same pre-step as the solver's PCG path; counted through the history
    Vector x0p = x0 + apply_preconditioner(prec, sys, aug_rhs - apply_augmented(sys, x0));
    KrylovResult pr = pcg(A, aug_rhs, P, x0p, kopts);
    pr.residual_history.insert(pr.residual_history.begin(),
                               (aug_rhs - apply_augmented(sys, x0)).norm());
    row.pcg_converged = pr.converged;
    row.pcg_history = pr.residual_history;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace lrsdp
