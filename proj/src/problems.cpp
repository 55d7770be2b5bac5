#include "lrsdp/problems.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lrsdp {

namespace {

// Fisher-Yates prefix: the first `take` entries of a seeded shuffle of 0..count-1.
std::vector<Eigen::Index> permutation_prefix(Eigen::Index count, Eigen::Index take, Rng& rng) {
  std::vector<Eigen::Index> idx(count);
  for (Eigen::Index i = 0; i < count; ++i) idx[i] = i;
  for (Eigen::Index i = 0; i < take; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.uniform_int(static_cast<std::uint64_t>(count - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(take);
  return idx;
}

}  // namespace

std::pair<ConicProgram, RmcInstance> gen_rmc(Eigen::Index n, Eigen::Index r_star, Eigen::Index m,
                                             Eigen::Index m_outliers, double lambda,
                                             std::uint64_t seed) {
  const Eigen::Index svec_dim = svec_length(n);
  if (m > svec_dim) throw InvalidDimension("gen_rmc: m exceeds n(n+1)/2");
  if (m_outliers > m) throw InvalidDimension("gen_rmc: more outliers than measurements");
  if (r_star < 1 || r_star > n) throw InvalidDimension("gen_rmc: bad rank");

  Rng rng(seed);
  RmcInstance inst;
  inst.n = n;
  inst.r_star = r_star;
  inst.m = m;
  inst.m_outliers = m_outliers;
  inst.seed = seed;
  inst.lambda = lambda;
  inst.G.resize(n, r_star);
  for (Eigen::Index j = 0; j < r_star; ++j)
    for (Eigen::Index i = 0; i < n; ++i) inst.G(i, j) = rng.normal();
  inst.X_star = inst.G * inst.G.transpose();

  inst.sample_index = permutation_prefix(svec_dim, m, rng);
  inst.outlier_index = permutation_prefix(m, m_outliers, rng);

  const Vector x_star_svec = svec(inst.X_star);
  inst.b.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) inst.b[i] = x_star_svec[inst.sample_index[i]];
  for (const Eigen::Index i : inst.outlier_index) inst.b[i] += 100.0 * rng.normal();

  // variables (v | w | svec(X)); constraint i:  v_i - w_i + svec(X)[sample_i] = b_i
  const ConeLayout layout{2 * m, n};
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(3 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    trips.emplace_back(i, i, 1.0);
    trips.emplace_back(i, m + i, -1.0);
    trips.emplace_back(i, 2 * m + inst.sample_index[i], 1.0);
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> A(m, layout.total_dim());
  A.setFromTriplets(trips.begin(), trips.end());

  ConicProgram prog;
  prog.layout = layout;
  prog.constraints = ConstraintOperator(layout, std::move(A));
  prog.b = inst.b;
  prog.cost = Vector::Zero(layout.total_dim());
  prog.cost.head(2 * m).setOnes();
  prog.cost.tail(svec_dim) = lambda * svec(Matrix::Identity(n, n));
  prog.ground_truth_factor = inst.G;
  return {std::move(prog), std::move(inst)};
}

std::vector<CenteredIterate> gen_centered_iterates(const Matrix& X_star, const Matrix& S_star,
                                                   const std::vector<double>& mu_list,
                                                   double delta_target, std::uint64_t seed) {
  const Eigen::Index n = X_star.rows();
  if (S_star.rows() != n) throw InvalidDimension("gen_centered_iterates: order mismatch");
  if (spectral_norm(X_star * S_star) > 1e-8 * (1.0 + spectral_norm(X_star) * spectral_norm(S_star)))
    throw GenerationFailure("gen_centered_iterates: X* S* != 0");

  // X* S* = 0 makes them simultaneously diagonalizable; eigenvectors of
  // X* - S* split into the two ranges.
  const EigenDecomposition ed = eig_sym(X_star - S_star);
  Vector a(n), c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a[i] = std::max(ed.values[i], 0.0);
    c[i] = std::max(-ed.values[i], 0.0);
    if (a[i] + c[i] <= 0.0) throw GenerationFailure("gen_centered_iterates: X* + S* is singular");
  }

  Rng rng(seed);
  Matrix Zx(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i <= j; ++i) Zx(i, j) = Zx(j, i) = rng.normal();
  Zx /= spectral_norm(Zx);

  // The S perturbation lives inside the range of S*; that keeps its size
  // mu-independent without wrecking the centrality at small mu.
  std::vector<Eigen::Index> s_range;
  for (Eigen::Index i = 0; i < n; ++i)
    if (c[i] > 0.0) s_range.push_back(i);
  Matrix Zs = Matrix::Zero(n, n);
  if (!s_range.empty()) {
    const auto n0 = static_cast<Eigen::Index>(s_range.size());
    Matrix U0(n, n0);
    for (Eigen::Index k = 0; k < n0; ++k) U0.col(k) = ed.vectors.col(s_range[k]);
    Matrix Z0(n0, n0);
    for (Eigen::Index j = 0; j < n0; ++j)
      for (Eigen::Index i = 0; i <= j; ++i) Z0(i, j) = Z0(j, i) = rng.normal();
    Zs = symmetrize(U0 * Z0 * U0.transpose());
    Zs /= spectral_norm(Zs);
  }

  std::vector<CenteredIterate> out;
  for (const double mu : mu_list) {
    if (mu <= 0.0) throw GenerationFailure("gen_centered_iterates: mu must be positive");
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = a[i] > 0.0 ? a[i] : mu / c[i];
    const Matrix X0 = ed.vectors * x.asDiagonal() * ed.vectors.transpose();
    const Matrix S0 = mu * ed.vectors * x.cwiseInverse().asDiagonal() * ed.vectors.transpose();

    double theta = 0.25 * delta_target;
    CenteredIterate it;
    it.mu = mu;
    bool ok = false;
    for (int attempt = 0; attempt < 80; ++attempt) {
      it.X = symmetrize(X0 + theta * mu * Zx);
      it.S = symmetrize(S0 + theta * Zs);
      const ConePoint Xp{Vector(0), it.X}, Sp{Vector(0), it.S};
      if (Xp.min_eig() > 0.0 && Sp.min_eig() > 0.0 && centrality(Xp, Sp, mu) <= delta_target) {
        ok = true;
        break;
      }
      if (theta == 0.0) break;
      theta = theta < 1e-30 ? 0.0 : 0.5 * theta;  // last attempt: unperturbed pair
    }
    if (!ok) throw GenerationFailure("gen_centered_iterates: cannot reach delta_target");
    out.push_back(std::move(it));
  }
  return out;
}

double reconstruction_error(const Matrix& X, const RmcInstance& instance) {
  return (X - instance.X_star).norm();
}

namespace {

void write_double(std::FILE* f, double v) { std::fprintf(f, "%.17g", v); }

struct LineReader {
  std::istream& in;
  int line = 0;
  std::istringstream tokens;

  bool next_line() {
    std::string s;
    while (std::getline(in, s)) {
      ++line;
      if (s.empty()) continue;
      tokens = std::istringstream(s);
      return true;
    }
    return false;
  }
  std::string word() {
    std::string w;
    if (!(tokens >> w)) throw ParseError(line, "unexpected end of line");
    return w;
  }
  double number() {
    double v;
    if (!(tokens >> v)) throw ParseError(line, "expected a number");
    return v;
  }
  Eigen::Index integer() {
    long long v;
    if (!(tokens >> v)) throw ParseError(line, "expected an integer");
    return static_cast<Eigen::Index>(v);
  }
};

}  // namespace

void save_problem(const std::string& path, const ConicProgram& prog) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw std::runtime_error("save_problem: cannot open " + path);

  std::fprintf(f, "LRSDP 1\n");
  std::fprintf(f, "cone %" PRIdPTR " %" PRIdPTR "\n", static_cast<std::intptr_t>(prog.layout.lp_dim),
               static_cast<std::intptr_t>(prog.layout.psd_order));

  Eigen::Index cost_nnz = 0;
  for (Eigen::Index i = 0; i < prog.cost.size(); ++i)
    if (prog.cost[i] != 0.0) ++cost_nnz;
  std::fprintf(f, "cost %" PRIdPTR "\n", static_cast<std::intptr_t>(cost_nnz));
  for (Eigen::Index i = 0; i < prog.cost.size(); ++i)
    if (prog.cost[i] != 0.0) {
      std::fprintf(f, "%" PRIdPTR " ", static_cast<std::intptr_t>(i));
      write_double(f, prog.cost[i]);
      std::fprintf(f, "\n");
    }

  const auto& A = prog.constraints.matrix();
  std::fprintf(f, "constraints %" PRIdPTR " %" PRIdPTR "\n", static_cast<std::intptr_t>(A.rows()),
               static_cast<std::intptr_t>(A.nonZeros()));
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A, i); it; ++it) {
      std::fprintf(f, "%" PRIdPTR " %" PRIdPTR " ", static_cast<std::intptr_t>(it.row()),
                   static_cast<std::intptr_t>(it.col()));
      write_double(f, it.value());
      std::fprintf(f, "\n");
    }

  std::fprintf(f, "rhs %" PRIdPTR "\n", static_cast<std::intptr_t>(prog.b.size()));
  for (Eigen::Index i = 0; i < prog.b.size(); ++i) {
    write_double(f, prog.b[i]);
    std::fprintf(f, "\n");
  }

  if (prog.has_ground_truth()) {
    std::fprintf(f, "groundtruth %" PRIdPTR " %" PRIdPTR "\n",
                 static_cast<std::intptr_t>(prog.ground_truth_factor.rows()),
                 static_cast<std::intptr_t>(prog.ground_truth_factor.cols()));
    for (Eigen::Index j = 0; j < prog.ground_truth_factor.cols(); ++j)
      for (Eigen::Index i = 0; i < prog.ground_truth_factor.rows(); ++i) {
        write_double(f, prog.ground_truth_factor(i, j));
        std::fprintf(f, "\n");
      }
  }
  std::fprintf(f, "end\n");
  std::fclose(f);
}

ConicProgram load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_problem: cannot open " + path);
  LineReader r{in};

  if (!r.next_line() || r.word() != "LRSDP") throw ParseError(r.line, "missing LRSDP header");
  if (r.word() != "1") throw ParseError(r.line, "unsupported LRSDP version");

  if (!r.next_line() || r.word() != "cone") throw ParseError(r.line, "expected cone line");
  ConicProgram prog;
  prog.layout.lp_dim = r.integer();
  prog.layout.psd_order = r.integer();
  if (prog.layout.lp_dim < 0 || prog.layout.psd_order < 1)
    throw ParseError(r.line, "invalid cone layout");
  const Eigen::Index total = prog.layout.total_dim();

  if (!r.next_line() || r.word() != "cost") throw ParseError(r.line, "expected cost line");
  const Eigen::Index cost_nnz = r.integer();
  prog.cost = Vector::Zero(total);
  for (Eigen::Index k = 0; k < cost_nnz; ++k) {
    if (!r.next_line()) throw ParseError(r.line, "truncated cost section");
    const Eigen::Index i = r.integer();
    if (i < 0 || i >= total) throw ParseError(r.line, "cost index out of range");
    prog.cost[i] = r.number();
  }

  if (!r.next_line() || r.word() != "constraints") throw ParseError(r.line, "expected constraints line");
  const Eigen::Index m = r.integer();
  const Eigen::Index nnz = r.integer();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(nnz));
  for (Eigen::Index k = 0; k < nnz; ++k) {
    if (!r.next_line()) throw ParseError(r.line, "truncated constraints section");
    const Eigen::Index i = r.integer();
    const Eigen::Index j = r.integer();
    if (i < 0 || i >= m || j < 0 || j >= total) throw ParseError(r.line, "constraint entry out of range");
    trips.emplace_back(i, j, r.number());
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> A(m, total);
  A.setFromTriplets(trips.begin(), trips.end());
  prog.constraints = ConstraintOperator(prog.layout, std::move(A));

  if (!r.next_line() || r.word() != "rhs") throw ParseError(r.line, "expected rhs line");
  if (r.integer() != m) throw ParseError(r.line, "rhs length differs from constraint count");
  prog.b.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    if (!r.next_line()) throw ParseError(r.line, "truncated rhs section");
    prog.b[k] = r.number();
  }

  if (!r.next_line()) throw ParseError(r.line, "missing end marker");
  std::string tag = r.word();
  if (tag == "groundtruth") {
    const Eigen::Index gn = r.integer();
    const Eigen::Index gr = r.integer();
    if (gn != prog.layout.psd_order || gr < 1) throw ParseError(r.line, "invalid ground truth shape");
    prog.ground_truth_factor.resize(gn, gr);
    for (Eigen::Index j = 0; j < gr; ++j)
      for (Eigen::Index i = 0; i < gn; ++i) {
        if (!r.next_line()) throw ParseError(r.line, "truncated ground truth section");
        prog.ground_truth_factor(i, j) = r.number();
      }
    if (!r.next_line()) throw ParseError(r.line, "missing end marker");
    tag = r.word();
  }
  if (tag != "end") throw ParseError(r.line, "expected end marker");
  return prog;
}

}  // namespace lrsdp
