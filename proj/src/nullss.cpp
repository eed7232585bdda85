#include "ncball/nullss.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <gmpxx.h>

#include "ncball/linalg.hpp"
#include "ncball/random.hpp"

namespace ncball {

namespace {

// Gaussian rationals a + bi with a, b ∈ Q.
struct GaussQ {
  mpq_class re{0};
  mpq_class im{0};

  GaussQ() = default;
  GaussQ(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {}
  explicit GaussQ(Complex z) : re(z.real()), im(z.imag()) {}

  bool is_zero() const { return re == 0 && im == 0; }
  GaussQ operator+(const GaussQ& o) const { return {re + o.re, im + o.im}; }
  GaussQ operator-(const GaussQ& o) const { return {re - o.re, im - o.im}; }
  GaussQ operator*(const GaussQ& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
  GaussQ operator/(const GaussQ& o) const {
    const mpq_class den = o.re * o.re + o.im * o.im;
    return {(re * o.re + im * o.im) / den, (im * o.re - re * o.im) / den};
  }
  Complex to_complex() const { return {re.get_d(), im.get_d()}; }
};

using QMatrix = std::vector<std::vector<GaussQ>>;

struct WordTable {
  std::vector<Word> words;
  std::map<Word, Index, GradedLex> index;

  WordTable(int letters, int degree) {
    const Grid grid{letters, 1};
    for (int len = 0; len <= degree; ++len) {
      for (const Word& w : words_of_length(grid, len)) {
        index.emplace(w, static_cast<Index>(words.size()));
        words.push_back(w);
      }
    }
  }
  Index size() const { return static_cast<Index>(words.size()); }
};

Word concat_words(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void require_plain(const PolyMatrix& p, const char* what) {
  if (p.grid().cols != 1) throw ShapeError(std::string(what) + ": polynomials must use a g×1 grid of variables");
  if (p.has_star()) throw PreconditionError(std::string(what) + ": starred letters are not allowed");
}

// Row s of P as (word, row coefficient) pairs.
std::vector<std::pair<Word, Mat>> row_terms(const PolyMatrix& p, Index s) {
  std::vector<std::pair<Word, Mat>> out;
  for (const auto& [w, c] : p.terms()) {
    Mat r = c.row(s);
    if (r.norm() > 0) out.emplace_back(w, r);
  }
  return out;
}

int row_degree(const PolyMatrix& p, Index s) {
  int deg = -1;
  for (const auto& [w, r] : row_terms(p, s)) deg = std::max(deg, static_cast<int>(w.size()));
  return deg;
}

struct CofactorSystem {
  std::vector<std::pair<Index, Word>> columns;  // (s, w)
  std::map<std::pair<Word, Index>, Index> rows; // (u, c)
  std::vector<std::map<Index, Complex>> entries;  // per row: column → value
  Mat rhs;                                      // rows × n
};

CofactorSystem build_system(const PolyMatrix& p, const PolyMatrix& q, int degree) {
  CofactorSystem sys;
  const Index m = p.shape().rows;
  const Index dcols = p.shape().cols;
  auto row_of = [&](const Word& u, Index c) {
    auto key = std::make_pair(u, c);
    auto it = sys.rows.find(key);
    if (it != sys.rows.end()) return it->second;
    const Index r = static_cast<Index>(sys.entries.size());
    sys.rows.emplace(key, r);
    sys.entries.emplace_back();
    return r;
  };
  const WordTable table(p.grid().rows, degree);
  for (Index s = 0; s < m; ++s) {
    const auto terms = row_terms(p, s);
    for (const Word& w : table.words) {
      const Index col = static_cast<Index>(sys.columns.size());
      sys.columns.emplace_back(s, w);
      for (const auto& [v, r] : terms) {
        const Word u = concat_words(w, v);
        for (Index c = 0; c < dcols; ++c) {
          if (r(0, c) == Complex(0.0)) continue;
          sys.entries[static_cast<std::size_t>(row_of(u, c))][col] += r(0, c);
        }
      }
    }
  }
  for (const auto& [u, coeff] : q.terms()) {
    for (Index c = 0; c < dcols; ++c) {
      if (coeff.col(c).norm() > 0) row_of(u, c);
    }
  }
  sys.rhs = Mat::Zero(static_cast<Index>(sys.entries.size()), q.shape().rows);
  for (const auto& [u, coeff] : q.terms()) {
    for (Index c = 0; c < dcols; ++c) {
      auto it = sys.rows.find({u, c});
      if (it == sys.rows.end()) continue;
      sys.rhs.row(it->second) = coeff.col(c).transpose();
    }
  }
  return sys;
}

Mat dense_matrix(const CofactorSystem& sys) {
  Mat a = Mat::Zero(static_cast<Index>(sys.entries.size()), static_cast<Index>(sys.columns.size()));
  for (std::size_t r = 0; r < sys.entries.size(); ++r)
    for (const auto& [c, v] : sys.entries[r]) a(static_cast<Index>(r), c) = v;
  return a;
}

// Least squares; returns the solution and max |A x − b|.
std::pair<Mat, double> float_solve(const CofactorSystem& sys) {
  const Mat a = dense_matrix(sys);
  if (a.cols() == 0) return {Mat::Zero(0, sys.rhs.cols()), sys.rhs.cwiseAbs().maxCoeff()};
  Mat x = a.completeOrthogonalDecomposition().solve(sys.rhs);
  const double res = sys.rhs.size() > 0 ? (a * x - sys.rhs).cwiseAbs().maxCoeff() : 0.0;
  return {x, res};
}

// Exact reduced row echelon solve of A X = B; nullopt when inconsistent.
std::optional<QMatrix> exact_solve(const CofactorSystem& sys) {
  const std::size_t rows = sys.entries.size();
  const std::size_t cols = sys.columns.size();
  const std::size_t nrhs = static_cast<std::size_t>(sys.rhs.cols());
  QMatrix aug(rows, std::vector<GaussQ>(cols + nrhs));
  for (std::size_t r = 0; r < rows; ++r) {
    for (const auto& [c, v] : sys.entries[r]) aug[r][static_cast<std::size_t>(c)] = GaussQ(v);
    for (std::size_t j = 0; j < nrhs; ++j) aug[r][cols + j] = GaussQ(sys.rhs(static_cast<Index>(r), static_cast<Index>(j)));
  }
  std::vector<std::size_t> pivot_cols;
  std::size_t prow = 0;
  for (std::size_t c = 0; c < cols && prow < rows; ++c) {
    std::size_t sel = rows;
    for (std::size_t r = prow; r < rows; ++r) {
      if (!aug[r][c].is_zero()) {
        sel = r;
        break;
      }
    }
    if (sel == rows) continue;
    std::swap(aug[prow], aug[sel]);
    const GaussQ piv = aug[prow][c];
    for (std::size_t k = c; k < cols + nrhs; ++k) {
      if (!aug[prow][k].is_zero()) aug[prow][k] = aug[prow][k] / piv;
    }
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == prow || aug[r][c].is_zero()) continue;
      const GaussQ f = aug[r][c];
      for (std::size_t k = c; k < cols + nrhs; ++k) {
        if (!aug[prow][k].is_zero()) aug[r][k] = aug[r][k] - f * aug[prow][k];
      }
    }
    pivot_cols.push_back(c);
    ++prow;
  }
  for (std::size_t r = prow; r < rows; ++r) {
    for (std::size_t j = 0; j < nrhs; ++j) {
      if (!aug[r][cols + j].is_zero()) return std::nullopt;
    }
  }
  QMatrix x(cols, std::vector<GaussQ>(nrhs));
  for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
    for (std::size_t j = 0; j < nrhs; ++j) x[pivot_cols[i]][j] = aug[i][cols + j];
  }
  return x;
}

// Q − G P = 0 in rational arithmetic, expanded term by term from the words.
bool exact_product_matches(const std::map<Word, std::vector<std::vector<GaussQ>>, GradedLex>& g_terms,
                           const PolyMatrix& p, const PolyMatrix& q) {
  const std::size_t n = static_cast<std::size_t>(q.shape().rows);
  const std::size_t dcols = static_cast<std::size_t>(q.shape().cols);
  const std::size_t m = static_cast<std::size_t>(p.shape().rows);
  std::map<Word, std::vector<std::vector<GaussQ>>, GradedLex> acc;
  auto slot = [&](const Word& u) -> std::vector<std::vector<GaussQ>>& {
    auto it = acc.find(u);
    if (it == acc.end()) it = acc.emplace(u, std::vector<std::vector<GaussQ>>(n, std::vector<GaussQ>(dcols))).first;
    return it->second;
  };
  for (const auto& [w, gc] : g_terms) {
    for (const auto& [v, pc] : p.terms()) {
      auto& target = slot(concat_words(w, v));
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t s = 0; s < m; ++s) {
          if (gc[j][s].is_zero()) continue;
          for (std::size_t c = 0; c < dcols; ++c) {
            const Complex pv = pc(static_cast<Index>(s), static_cast<Index>(c));
            if (pv == Complex(0.0)) continue;
            target[j][c] = target[j][c] + gc[j][s] * GaussQ(pv);
          }
        }
    }
  }
  for (const auto& [u, qc] : q.terms()) {
    auto& target = slot(u);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t c = 0; c < dcols; ++c)
        target[j][c] = target[j][c] - GaussQ(qc(static_cast<Index>(j), static_cast<Index>(c)));
  }
  for (const auto& [u, mtx] : acc)
    for (const auto& row : mtx)
      for (const auto& e : row)
        if (!e.is_zero()) return false;
  return true;
}

MatrixTuple random_rank_point(int g, Index level, Rng& rng) {
  MatrixTuple x(Grid{g, 1}, level);
  for (int j = 0; j < g; ++j) {
    const Index r = static_cast<Index>(uniform(rng) * static_cast<double>(level + 1));
    x.at(j, 0) = r == 0 ? Mat(Mat::Zero(level, level)) : Mat(ginibre(level, r, rng) * ginibre(r, level, rng));
  }
  return x;
}

}  // namespace

PolyMatrix pack_poly_matrix(const std::vector<std::vector<NCPolynomial>>& entries, int variables) {
  if (entries.empty() || entries.front().empty()) throw ShapeError("pack_poly_matrix: empty matrix");
  const Grid grid{variables, 1};
  const auto rows = static_cast<int>(entries.size());
  const auto cols = static_cast<int>(entries.front().size());
  PolyMatrix out(grid, Shape{rows, cols});
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(entries[i].size()) != cols) throw ShapeError("pack_poly_matrix: ragged rows");
    for (int j = 0; j < cols; ++j) {
      const NCPolynomial& e = entries[i][j];
      if (e.grid() != grid || e.shape() != Shape{1, 1}) throw ShapeError("pack_poly_matrix: entries must be scalar");
      for (const auto& [w, c] : e.terms()) {
        Mat unit = Mat::Zero(rows, cols);
        unit(i, j) = c(0, 0);
        out.add_term(w, unit);
      }
    }
  }
  return out;
}

std::vector<std::vector<NCPolynomial>> unpack_poly_matrix(const PolyMatrix& m) {
  const Grid grid = m.grid();
  std::vector<std::vector<NCPolynomial>> out(
      static_cast<std::size_t>(m.shape().rows),
      std::vector<NCPolynomial>(static_cast<std::size_t>(m.shape().cols), NCPolynomial(grid, Shape{1, 1})));
  for (const auto& [w, c] : m.terms())
    for (Index i = 0; i < c.rows(); ++i)
      for (Index j = 0; j < c.cols(); ++j)
        if (c(i, j) != Complex(0.0)) out[i][j].add_term(w, Mat::Constant(1, 1, c(i, j)));
  return out;
}

std::string to_string(SolveMode m) { return m == SolveMode::exact ? "exact" : "float"; }

SolveMode solve_mode_from_string(const std::string& s) {
  if (s == "exact") return SolveMode::exact;
  if (s == "float") return SolveMode::floating;
  throw Error("unknown solve mode '" + s + "' (expected exact or float)");
}

Vec row_coordinates(const NCPolynomial& row, int degree) {
  if (row.shape().rows != 1) throw ShapeError("row_coordinates: expects a single row");
  const WordTable table(row.grid().rows, degree);
  Vec out = Vec::Zero(row.shape().cols * table.size());
  for (const auto& [w, c] : row.terms()) {
    auto it = table.index.find(w);
    if (it == table.index.end()) throw PreconditionError("row_coordinates: term exceeds the degree");
    for (Index k = 0; k < c.cols(); ++k) out(k * table.size() + it->second) = c(0, k);
  }
  return out;
}

QuotientModel quotient_model(const PolyMatrix& p, int n, int max_escalation) {
  require_plain(p, "quotient_model");
  if (n < std::max(0, p.degree())) throw PreconditionError("quotient_model: N must be at least deg P");
  const int g = p.grid().rows;
  const Index dcols = p.shape().cols;
  const WordTable low(g, n);
  QuotientModel qm;
  qm.degree = n;
  qm.ambient_dim = dcols * low.size();
  Mat sub(qm.ambient_dim, 0);
  for (int np = n; np <= n + max_escalation; ++np) {
    const WordTable ext(g, np);
    if (dcols * ext.size() > 4000) break;
    std::vector<Vec> gens;
    for (Index s = 0; s < p.shape().rows; ++s) {
      const int deg = row_degree(p, s);
      if (deg < 0) continue;
      const auto terms = row_terms(p, s);
      for (const Word& w : ext.words) {
        if (static_cast<int>(w.size()) + deg > np) break;
        Vec v = Vec::Zero(dcols * ext.size());
        for (const auto& [u, r] : terms) {
          const Index idx = ext.index.at(concat_words(w, u));
          for (Index c = 0; c < dcols; ++c) v(c * ext.size() + idx) += r(0, c);
        }
        gens.push_back(v);
      }
    }
    Mat genm(dcols * ext.size(), static_cast<Index>(gens.size()));
    for (std::size_t i = 0; i < gens.size(); ++i) genm.col(static_cast<Index>(i)) = gens[i];
    // Rows of words longer than N must cancel.
    std::vector<Index> low_rows, high_rows;
    for (Index c = 0; c < dcols; ++c)
      for (Index i = 0; i < ext.size(); ++i)
        (static_cast<int>(ext.words[static_cast<std::size_t>(i)].size()) <= n ? low_rows : high_rows)
            .push_back(c * ext.size() + i);
    Mat lowm(static_cast<Index>(low_rows.size()), genm.cols());
    Mat highm(static_cast<Index>(high_rows.size()), genm.cols());
    for (std::size_t i = 0; i < low_rows.size(); ++i) lowm.row(static_cast<Index>(i)) = genm.row(low_rows[i]);
    for (std::size_t i = 0; i < high_rows.size(); ++i) highm.row(static_cast<Index>(i)) = genm.row(high_rows[i]);
    Mat combos = highm.rows() > 0 && genm.cols() > 0 ? linalg::null_space(highm)
                                                     : Mat(Mat::Identity(genm.cols(), genm.cols()));
    // low_rows enumerate (c, low word) in the same order as the ambient coordinates.
    Mat span = lowm * combos;
    sub = span.cols() > 0 ? linalg::range_basis(span) : Mat(qm.ambient_dim, 0);
    qm.history.push_back(sub.cols());
    qm.generator_degree = np;
    const std::size_t h = qm.history.size();
    if (h >= 3 && qm.history[h - 1] == qm.history[h - 2] && qm.history[h - 2] == qm.history[h - 3]) {
      qm.stabilized = true;
      break;
    }
  }
  qm.submodule = sub;
  Mat full = linalg::complete_to_unitary(sub.cols() > 0 ? sub : Mat(qm.ambient_dim, 0));
  qm.basis = full.rightCols(qm.ambient_dim - sub.cols());
  qm.dim = qm.basis.cols();
  for (int j = 0; j < g; ++j) {
    Mat t = Mat::Zero(qm.ambient_dim, qm.ambient_dim);
    for (Index c = 0; c < dcols; ++c) {
      for (Index i = 0; i < low.size(); ++i) {
        const Word& w = low.words[static_cast<std::size_t>(i)];
        if (static_cast<int>(w.size()) >= n) continue;
        Word xw{Letter{j, 0, false}};
        xw.insert(xw.end(), w.begin(), w.end());
        t(c * low.size() + low.index.at(xw), c * low.size() + i) = 1.0;
      }
    }
    qm.y.push_back(qm.basis.adjoint() * t * qm.basis);
    if (sub.cols() > 0) qm.well_defined_defect = std::max(qm.well_defined_defect, linalg::op_norm(qm.basis.adjoint() * t * sub));
  }
  for (Index c = 0; c < dcols; ++c) {
    Vec e = Vec::Zero(qm.ambient_dim);
    e(c * low.size()) = 1.0;
    qm.v.push_back(qm.basis.adjoint() * e);
  }
  return qm;
}

KernelHypothesisReport kernel_hypothesis_check(const PolyMatrix& p, const PolyMatrix& q, int levels, int samples,
                                               std::uint64_t seed) {
  require_plain(p, "kernel_hypothesis_check");
  require_plain(q, "kernel_hypothesis_check");
  if (p.shape().cols != q.shape().cols || !(p.grid() == q.grid())) {
    throw ShapeError("kernel_hypothesis_check: P and Q need the same variables and column count");
  }
  KernelHypothesisReport r;
  const int g = p.grid().rows;
  Rng rng(derive_seed(seed, "kernel-hypothesis"));
  for (int s = 0; s < samples; ++s) {
    const Index level = 1 + s % std::max(1, levels);
    MatrixTuple x = random_rank_point(g, level, rng);
    const Mat px = eval_poly(p, x);
    const Mat qx = eval_poly(q, x);
    const Mat ker = linalg::null_space(px);
    if (ker.cols() == 0) continue;
    ++r.samples_with_kernel;
    const Mat img = qx * ker;
    const double res = linalg::op_norm(img) / std::max(1.0, linalg::op_norm(qx));
    if (res > r.sampling_max_residual) {
      r.sampling_max_residual = res;
      if (res > 1e-6) {
        Eigen::JacobiSVD<Mat> svd(img, Eigen::ComputeThinV);
        const Vec vec = ker * svd.matrixV().col(0);
        r.counterexample = KernelCounterexample{x, vec, (qx * vec).norm()};
      }
    }
  }
  const int n = std::max(std::max(p.degree(), q.degree()), 0) + 1;
  QuotientModel qm = quotient_model(p, n);
  r.model_stabilized = qm.stabilized;
  const WordTable low(g, n);
  for (Index j = 0; j < q.shape().rows; ++j) {
    const Vec coords = row_coordinates(q.block(static_cast<int>(j), 0, 1, static_cast<int>(q.shape().cols)), n);
    r.membership_residual = std::max(r.membership_residual, (qm.basis.adjoint() * coords).norm());
    Vec acc = Vec::Zero(qm.dim);
    for (const auto& [w, c] : q.terms()) {
      for (Index col = 0; col < c.cols(); ++col) {
        if (c(j, col) == Complex(0.0)) continue;
        Vec t = qm.v[static_cast<std::size_t>(col)];
        for (auto it = w.rbegin(); it != w.rend(); ++it) t = qm.y[static_cast<std::size_t>(it->row)] * t;
        acc += c(j, col) * t;
      }
    }
    r.model_residual = std::max(r.model_residual, acc.norm());
  }
  const bool model_fails = r.membership_residual > 1e-8;
  if (r.counterexample || model_fails) {
    r.verdict = "fails";
  } else if (qm.stabilized) {
    r.holds = true;
    r.verdict = "holds";
  } else {
    r.verdict = "inconclusive";
  }
  return r;
}

int default_cofactor_degree(const PolyMatrix& p, const PolyMatrix& q) {
  return std::max(q.degree(), 0) + std::max(p.degree(), 0) + 2;
}

CofactorResult cofactor_solve(const PolyMatrix& p, const PolyMatrix& q, int max_degree, SolveMode mode,
                              std::uint64_t seed) {
  require_plain(p, "cofactor_solve");
  require_plain(q, "cofactor_solve");
  if (p.shape().cols != q.shape().cols || !(p.grid() == q.grid())) {
    throw ShapeError("cofactor_solve: P and Q need the same variables and column count");
  }
  if (max_degree < 0) throw PreconditionError("cofactor_solve: max degree must be non-negative");
  CofactorResult out;
  out.mode = mode;
  out.max_degree = max_degree;
  out.min_residual = std::numeric_limits<double>::infinity();
  const Index n = q.shape().rows, m = p.shape().rows;
  for (int deg = 0; deg <= max_degree; ++deg) {
    const CofactorSystem sys = build_system(p, q, deg);
    auto [xf, fres] = float_solve(sys);
    out.min_residual = std::min(out.min_residual, fres);
    PolyMatrix gm(p.grid(), Shape{static_cast<int>(n), static_cast<int>(m)});
    if (mode == SolveMode::exact) {
      auto xq = exact_solve(sys);
      if (!xq) continue;
      std::map<Word, std::vector<std::vector<GaussQ>>, GradedLex> g_terms;
      for (std::size_t k = 0; k < sys.columns.size(); ++k) {
        const auto& [s, w] = sys.columns[k];
        auto it = g_terms.find(w);
        if (it == g_terms.end()) {
          it = g_terms.emplace(w, std::vector<std::vector<GaussQ>>(static_cast<std::size_t>(n),
                                                                     std::vector<GaussQ>(static_cast<std::size_t>(m))))
                   .first;
        }
        for (Index j = 0; j < n; ++j) it->second[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] = (*xq)[k][static_cast<std::size_t>(j)];
      }
      for (const auto& [w, gc] : g_terms) {
        Mat c(n, m);
        for (Index j = 0; j < n; ++j)
          for (Index s = 0; s < m; ++s) c(j, s) = gc[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)].to_complex();
        gm.add_term(w, c);
      }
      out.exact_verified = exact_product_matches(g_terms, p, q);
    } else {
      if (fres > 1e-10) continue;
      for (std::size_t k = 0; k < sys.columns.size(); ++k) {
        const auto& [s, w] = sys.columns[k];
        Mat c = Mat::Zero(n, m);
        c.col(s) = xf.row(static_cast<Index>(k)).transpose();
        gm.add_term(w, c);
      }
    }
    const PolyMatrix diff = q - gm * p;
    double res = 0.0;
    for (const auto& [w, c] : diff.terms()) res = std::max(res, c.cwiseAbs().maxCoeff());
    out.success = true;
    out.g = gm;
    out.degree_used = deg;
    out.residual = (mode == SolveMode::exact && out.exact_verified) ? 0.0 : res;
    out.min_residual = out.residual;
    out.message = "Q = G P with deg G ≤ " + std::to_string(deg);
    return out;
  }
  KernelHypothesisReport kh = kernel_hypothesis_check(p, q, 3, 60, seed);
  out.counterexample = kh.counterexample;
  out.budget_exhausted = !kh.counterexample.has_value();
  out.message = kh.counterexample ? "no representation up to degree " + std::to_string(max_degree) +
                                        "; the kernel hypothesis fails at a sampled point"
                                  : "no representation up to degree " + std::to_string(max_degree) +
                                        "; degree budget exhausted";
  return out;
}

}  // namespace ncball
