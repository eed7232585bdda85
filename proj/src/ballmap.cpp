#include "ncball/ballmap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "ncball/fock.hpp"
#include "ncball/linalg.hpp"
#include "ncball/random.hpp"

namespace ncball {

namespace {

void require_zero_constant(const TruncatedSeries& h, const char* what) {
  if (linalg::op_norm(h.part(0).constant_term()) > 1e-12) {
    throw PreconditionError(std::string(what) + ": constant term must vanish");
  }
}

Mat block_or_empty(const Mat& c, Index r, Index col, Index rows, Index cols) {
  if (rows <= 0 || cols <= 0) return Mat(std::max<Index>(rows, 0), std::max<Index>(cols, 0));
  return c.block(r, col, rows, cols);
}

double sample_radius(Rng& rng) { return 0.9 * (0.2 + 0.8 * uniform(rng)); }

Mat column_gram(const MatrixTuple& x) {
  Mat sum = Mat::Zero(x.level(), x.level());
  for (const Mat& e : x.entries()) sum += e.adjoint() * e;
  return sum;
}

Index fock_dim(int letters, int n) {
  Index total = 0, layer = 1;
  for (int k = 0; k <= n; ++k) {
    total += layer;
    layer *= letters;
  }
  return total;
}

// Corroboration of a vanishing block with the exact model;
// returns false when the model finds a violation.
bool fock_block_consistent(const NCPolynomial& p, bool* ran) {
  if (p.is_zero() || p.shape().rows == 0 || p.shape().cols == 0) return true;
  const int n = std::max(1, p.degree());
  const Index level = fock_dim(p.grid().rows, n) * fock_dim(p.grid().cols, n);
  if (level * std::max(p.shape().rows, p.shape().cols) > 600) return true;
  *ran = true;
  return unique_s_polynomial_test(p, n).consistent_with_zero;
}

}  // namespace

LinearMatrixMap linear_part(const TruncatedSeries& h) {
  require_zero_constant(h, "linear_part");
  if (h.degree() < 1) {
    std::vector<Mat> zeros(static_cast<std::size_t>(h.grid().size()), Mat::Zero(h.shape().rows, h.shape().cols));
    return LinearMatrixMap(h.grid(), zeros);
  }
  return LinearPencil::from_polynomial(h.part(1));
}

TruncatedSeries compose_pencil(const LinearPencil& l, const TruncatedSeries& f) {
  if (!(l.grid() == Grid{f.shape().rows, f.shape().cols})) {
    throw ShapeError("pencil grid " + to_string(l.grid()) + " does not match series shape " + to_string(f.shape()));
  }
  const Shape out_shape = l.shape();
  TruncatedSeries out(f.grid(), out_shape, f.degree());
  for (const NCPolynomial& part : f.parts()) {
    NCPolynomial p(f.grid(), out_shape);
    for (const auto& [w, c] : part.terms()) {
      Mat acc = Mat::Zero(out_shape.rows, out_shape.cols);
      for (int i = 0; i < l.grid().rows; ++i)
        for (int j = 0; j < l.grid().cols; ++j) acc += c(i, j) * l.at(i, j);
      p.add_term(w, acc);
    }
    out.add(p);
  }
  return out;
}

double tail_heuristic(const TruncatedSeries& f, const MatrixTuple& x) {
  const double rho = x.norm();
  if (rho >= 1.0) return std::numeric_limits<double>::infinity();
  return series_tail_indicator(f, x) * rho / (1.0 - rho);
}

BallMapAnalysis canonical_form_zero(const TruncatedSeries& h, double tol, std::uint64_t seed) {
  require_zero_constant(h, "canonical_form_zero");
  BallMapAnalysis a;
  a.input = h;
  a.linear_part = linear_part(h);
  const int gp = h.grid().rows, g = h.grid().cols;
  const int dp = h.shape().rows, d = h.shape().cols;
  IsometryCertification ic = certify_complete_isometry(a.linear_part, tol, seed);
  if (!ic.accepted) {
    a.stage = "linear part: " + ic.stage;
    a.message = ic.message;
    return a;
  }
  a.cert = ic.certificate;
  const Mat& u = a.cert->u;
  const Mat& v = a.cert->v;
  const TruncatedSeries k = h.left_mul(v.adjoint()).right_mul(u);

  a.tilde_shape = Shape{dp - gp, d - g};
  const bool has_tilde = a.tilde_shape.rows > 0 && a.tilde_shape.cols > 0;
  if (has_tilde) {
    TruncatedSeries t(h.grid(), a.tilde_shape, h.degree());
    for (int alpha = 1; alpha <= h.degree(); ++alpha) {
      if (alpha == 1) {
        t.add(a.cert->phi.to_polynomial());
      } else {
        t.add(k.part(alpha).block(gp, g, dp - gp, d - g));
      }
    }
    a.tilde_h = t;
  }

  const char* names[] = {"b1", "b2", "b3"};
  for (int alpha = 2; alpha <= h.degree() && !a.violation; ++alpha) {
    double worst[3] = {0.0, 0.0, 0.0};
    for (const auto& [w, c] : k.part(alpha).terms()) {
      worst[0] = std::max(worst[0], linalg::op_norm(block_or_empty(c, 0, 0, gp, g)));
      worst[1] = std::max(worst[1], linalg::op_norm(block_or_empty(c, 0, g, gp, d - g)));
      worst[2] = std::max(worst[2], linalg::op_norm(block_or_empty(c, gp, 0, dp - gp, g)));
    }
    int idx = static_cast<int>(std::max_element(worst, worst + 3) - worst);
    a.max_offdiag = std::max(a.max_offdiag, worst[idx]);
    if (worst[idx] > tol) a.violation = BlockViolation{alpha, names[idx], worst[idx]};
  }
  if (a.violation) {
    a.stage = "off-diagonal blocks";
    a.message = "alpha=" + std::to_string(a.violation->alpha) + " block " + a.violation->block +
                " norm " + std::to_string(a.violation->norm);
    return a;
  }

  // Rebuild V diag(x, h̃) U* and compare with h.
  TruncatedSeries rebuilt(h.grid(), h.shape(), h.degree());
  NCPolynomial lin(h.grid(), h.shape());
  for (int j = 0; j < gp; ++j) {
    for (int l = 0; l < g; ++l) {
      Mat c = Mat::Zero(dp, d);
      c(j, l) = 1.0;
      if (has_tilde) c.block(gp, g, dp - gp, d - g) = a.cert->phi.at(j, l);
      lin.add_term({Letter{j, l, false}}, c);
    }
  }
  rebuilt.add(lin);
  if (has_tilde) {
    for (int alpha = 2; alpha <= h.degree(); ++alpha) {
      NCPolynomial p(h.grid(), h.shape());
      for (const auto& [w, c] : a.tilde_h->part(alpha).terms()) {
        Mat full = Mat::Zero(dp, d);
        full.block(gp, g, dp - gp, d - g) = c;
        p.add_term(w, full);
      }
      rebuilt.add(p);
    }
  }
  a.reconstruction_residual = h.distance(rebuilt.left_mul(v).right_mul(u.adjoint()));

  NCPolynomial b2(h.grid(), Shape{gp, d - g});
  NCPolynomial b3(h.grid(), Shape{dp - gp, g});
  for (int alpha = 2; alpha <= h.degree(); ++alpha) {
    if (d > g) b2 = b2 + k.part(alpha).block(0, g, gp, d - g);
    if (dp > gp) b3 = b3 + k.part(alpha).block(gp, 0, dp - gp, g);
  }
  bool ran = false;
  if (d > g) a.fock_consistent = fock_block_consistent(b2, &ran) && a.fock_consistent;
  if (dp > gp) a.fock_consistent = fock_block_consistent(b3, &ran) && a.fock_consistent;
  a.fock_checked = ran;
  if (!a.fock_consistent) {
    a.stage = "fock model";
    a.message = "the Fock model detects a nonvanishing off-diagonal block";
    return a;
  }
  if (a.reconstruction_residual > tol) {
    a.stage = "reconstruction";
    a.message = "reconstruction residual " + std::to_string(a.reconstruction_residual);
    return a;
  }
  a.accepted = true;
  return a;
}

BallMapAnalysis canonical_form_general(const TruncatedSeries& f, double tol, std::uint64_t seed) {
  const Mat base = f.part(0).constant_term();
  const double nb = linalg::op_norm(base);
  if (nb >= 1.0) {
    throw PreconditionError("canonical_form_general: requires ‖f(0)‖ < 1, got " + std::to_string(nb));
  }
  if (nb <= 1e-12) return canonical_form_zero(f, tol, seed);
  MoebiusParams params(base);
  TruncatedSeries phi = moebius_compose_series(params, f, f.degree());
  // F_{f(0)}(f(0)) = 0; drop rounding noise in the constant term.
  TruncatedSeries phi0(phi.grid(), phi.shape(), phi.degree());
  for (int alpha = 1; alpha <= phi.degree(); ++alpha) phi0.add(phi.part(alpha));
  BallMapAnalysis a = canonical_form_zero(phi0, tol, seed);
  a.input = f;
  a.via_moebius = true;
  a.basepoint = base;
  a.phi = phi0;
  a.round_trip_residual = f.distance(moebius_compose_series(params, phi0, f.degree()));
  if (a.accepted && a.round_trip_residual > tol) {
    a.accepted = false;
    a.stage = "round trip";
    a.message = "round-trip residual " + std::to_string(a.round_trip_residual);
  }
  return a;
}

BallMapAnalysis pencil_ball_map_form(const LinearPencil& l, const TruncatedSeries& f, double tol,
                                     std::uint64_t seed) {
  const TruncatedSeries h = compose_pencil(l, f);
  const double n0 = linalg::op_norm(h.part(0).constant_term());
  if (n0 <= 1e-12) return canonical_form_zero(h, tol, seed);
  if (n0 < 1.0) return canonical_form_general(h, tol, seed);
  throw PreconditionError("pencil_ball_map_form: requires ‖L∘f(0)‖ < 1, got " + std::to_string(n0));
}

SchwarzReport schwarz_suite(const TruncatedSeries& f, const SuiteOptions& opts) {
  if (f.grid().cols != 1) throw ShapeError("schwarz_suite: expects a series on a g×1 grid");
  require_zero_constant(f, "schwarz_suite");
  if (opts.levels < 1) throw PreconditionError("schwarz_suite: levels must be at least 1");
  SchwarzReport r;
  r.min_eigenvalue = std::numeric_limits<double>::infinity();
  Rng rng(derive_seed(opts.seed, "schwarz"));
  const Index d = f.shape().cols;
  for (int s = 0; s < opts.samples; ++s) {
    const Index level = 1 + s % opts.levels;
    MatrixTuple x = random_tuple(f.grid(), level, sample_radius(rng), rng);
    const Mat fx = series_eval(f, x);
    const Mat form = linalg::kron(Mat::Identity(d, d), column_gram(x)) - fx.adjoint() * fx;
    const double lam = linalg::min_eigen(form).value;
    const double nrm = linalg::op_norm(fx);
    const double tail = tail_heuristic(f, x);
    const double slack = opts.truncated ? tail : 0.0;
    ++r.samples;
    r.min_eigenvalue = std::min(r.min_eigenvalue, lam);
    r.max_norm = std::max(r.max_norm, nrm);
    r.max_tail = std::max(r.max_tail, tail);
    const bool ok = lam >= -(slack + 1e-7) && nrm <= 1.0 + slack + 1e-12;
    if (!ok && r.pass) {
      r.pass = false;
      r.first_failure = SampleFailure{s, x, lam};
      if (opts.stop_on_failure) break;
    }
  }
  if (r.samples == 0) r.min_eigenvalue = 0.0;
  return r;
}

ScottReport scott_suite(const std::vector<TruncatedSeries>& h, const SuiteOptions& opts) {
  if (h.empty()) throw ShapeError("scott_suite: empty row");
  const int gp = static_cast<int>(h.size());
  const Shape shape = h.front().shape();
  for (const TruncatedSeries& hj : h) {
    if (!(hj.grid() == Grid{gp, 1}) || !(hj.shape() == shape)) {
      throw ShapeError("scott_suite: every entry must live on a " + std::to_string(gp) + "x1 grid with a common shape");
    }
  }
  ScottReport r;
  r.min_conclusion = std::numeric_limits<double>::infinity();
  Rng rng(derive_seed(opts.seed, "scott"));
  const Index d = shape.cols, dp = shape.rows;
  std::vector<std::pair<MatrixTuple, double>> conclusions;
  for (int s = 0; s < opts.samples; ++s) {
    const Index level = 1 + s % std::max(1, opts.levels);
    MatrixTuple x = random_tuple(Grid{gp, 1}, level, sample_radius(rng), rng);
    Mat gx = Mat::Zero(dp * level, d * level);
    Mat row(dp * level, static_cast<Index>(gp) * d * level);
    for (int j = 0; j < gp; ++j) {
      const Mat hj = series_eval(h[static_cast<std::size_t>(j)], x);
      gx += hj * linalg::kron(Mat::Identity(d, d), x.at(j, 0));
      row.middleCols(static_cast<Index>(j) * d * level, d * level) = hj;
    }
    ++r.samples;
    const double gn = linalg::op_norm(gx);
    r.max_hypothesis = std::max(r.max_hypothesis, gn);
    if (gn <= 1.0 + 1e-12) ++r.hypothesis_held;
    const double lam = linalg::min_eigen(Mat::Identity(row.rows(), row.rows()) - row * row.adjoint()).value;
    r.min_conclusion = std::min(r.min_conclusion, lam);
    conclusions.emplace_back(std::move(x), lam);
  }
  r.hypothesis_everywhere = r.samples > 0 && r.hypothesis_held == r.samples;
  if (r.hypothesis_everywhere) {
    for (std::size_t s = 0; s < conclusions.size(); ++s) {
      if (conclusions[s].second >= -1e-7) continue;
      ++r.implication_violations;
      if (!r.first_violation) r.first_violation = SampleFailure{static_cast<int>(s), conclusions[s].first, conclusions[s].second};
    }
  }
  if (r.samples == 0) r.min_conclusion = 0.0;
  return r;
}

BidiskDecomposition bidisk_decompose(const TruncatedSeries& h, double tol, int levels, int samples,
                                     std::uint64_t seed) {
  if (h.grid().cols != 1) throw ShapeError("bidisk_decompose: expects a series on a g×1 grid");
  require_zero_constant(h, "bidisk_decompose");
  const int gp = h.grid().rows;
  const Index dp = h.shape().rows, d = h.shape().cols;
  const Index wide = static_cast<Index>(gp) * d;
  BidiskDecomposition dec;
  dec.m = Mat::Zero(dp, wide);
  if (h.degree() >= 1) {
    for (int k = 0; k < gp; ++k) dec.m.middleCols(k * d, d) = h.part(1).coeff({Letter{k, 0, false}});
  }
  if (linalg::op_norm(dec.m) > 1.0 + 1e-9) throw PreconditionError("bidisk_decompose: linear part is not a contraction");
  const Mat gram = Mat::Identity(wide, wide) - dec.m.adjoint() * dec.m;
  Eigen::SelfAdjointEigenSolver<Mat> es(linalg::hermitian_part(gram).h);
  Index kdim = 0;
  for (Index i = 0; i < wide; ++i) {
    if (es.eigenvalues()(i) <= 1e-9) ++kdim;
  }
  if (kdim == 0) throw PreconditionError("bidisk_decompose: ker(I − M*M) = {0}, the linear part does not cling");
  dec.s = es.eigenvectors().leftCols(kdim);
  dec.s_perp = es.eigenvectors().rightCols(wide - kdim);
  const Mat proj_perp = dec.s_perp * dec.s_perp.adjoint();

  for (int alpha = 2; alpha <= h.degree(); ++alpha) {
    NCPolynomial q(h.grid(), Shape{static_cast<int>(dp), static_cast<int>(wide)});
    for (const auto& [w, c] : h.part(alpha).terms()) {
      if (w.back().star) throw PreconditionError("bidisk_decompose: series has starred letters");
      Word head(w.begin(), w.end() - 1);
      Mat block = Mat::Zero(dp, wide);
      block.middleCols(static_cast<Index>(w.back().row) * d, d) = c;
      q.add_term(head, block);
    }
    double res = 0.0;
    for (const auto& [w, c] : q.terms()) res = std::max(res, linalg::op_norm(c * dec.s));
    dec.factor_residuals.push_back(res);
    if (res > tol && dec.failed_alpha == 0) dec.failed_alpha = alpha;
    dec.p_parts.push_back(q.right_mul(proj_perp));
  }

  const Mat ms = dec.m * dec.s;
  dec.isometry_defect = linalg::op_norm(ms.adjoint() * ms - Mat::Identity(kdim, kdim));
  dec.perp_contraction = linalg::op_norm(dec.m * dec.s_perp);
  dec.orth_linear = linalg::op_norm(ms.adjoint() * dec.m * dec.s_perp);

  Rng rng(derive_seed(seed, "bidisk"));
  bool norms_ok = true;
  for (int s = 0; s < samples; ++s) {
    const Index level = 1 + s % std::max(1, levels);
    MatrixTuple x = random_tuple(h.grid(), level, sample_radius(rng), rng);
    const Mat id = Mat::Identity(level, level);
    const Mat left = linalg::kron(ms, id);
    const Mat right = linalg::kron(dec.s_perp, id);
    Mat total = linalg::kron(dec.m, id);
    for (const NCPolynomial& p : dec.p_parts) {
      const Mat px = eval_poly(p, x);
      dec.orth_parts = std::max(dec.orth_parts, linalg::op_norm(left.adjoint() * px * right));
      total += px;
    }
    const double nrm = linalg::op_norm(total * linalg::kron(proj_perp, id));
    const double tail = tail_heuristic(h, x);
    dec.max_perp_norm = std::max(dec.max_perp_norm, nrm);
    dec.max_tail = std::max(dec.max_tail, tail);
    if (nrm > 1.0 + tail + 1e-7) norms_ok = false;
  }
  dec.pass = dec.failed_alpha == 0 && dec.isometry_defect <= 1e-9 && dec.perp_contraction < 1.0 &&
             dec.orth_linear <= 1e-8 && dec.orth_parts <= 1e-8 && norms_ok;
  return dec;
}

TruncatedSeries bidisk_assemble(const BidiskDecomposition& dec, Grid grid, Shape shape) {
  const int gp = grid.rows;
  const Index d = shape.cols;
  TruncatedSeries out(grid, shape, static_cast<int>(dec.p_parts.size()) + 1);
  NCPolynomial lin(grid, shape);
  for (int k = 0; k < gp; ++k) lin.add_term({Letter{k, 0, false}}, dec.m.middleCols(k * d, d));
  out.add(lin);
  for (const NCPolynomial& p : dec.p_parts) {
    NCPolynomial part(grid, shape);
    for (const auto& [w, c] : p.terms()) {
      for (int k = 0; k < gp; ++k) {
        Word ext = w;
        ext.push_back(Letter{k, 0, false});
        part.add_term(ext, c.middleCols(k * d, d));
      }
    }
    out.add(part);
  }
  return out;
}

Mat random_partial_isometry_point(Index rows, Index cols, Index rank, std::uint64_t seed) {
  Rng rng(seed);
  const Index m = std::min(rows, cols);
  if (rank > m) throw PreconditionError("random_partial_isometry_point: rank exceeds min(rows, cols)");
  Mat sigma = Mat::Zero(rows, cols);
  for (Index i = 0; i < m; ++i) sigma(i, i) = i < rank ? 1.0 : 0.9 * uniform(rng);
  return random_unitary(rows, rng) * sigma * random_unitary(cols, rng).adjoint();
}

MaxPrincipleReport maximum_principle_sample(const TruncatedSeries& f, int n, int k, int samples,
                                            std::uint64_t seed, int circle_points) {
  const int gp = f.grid().rows, g = f.grid().cols;
  if (k < 1 || k > std::min(gp, g)) throw PreconditionError("maximum_principle_sample: need 0 < k ≤ min(g', g)");
  MaxPrincipleReport r;
  Rng rng(derive_seed(seed, "max-principle"));
  const double pi = std::numbers::pi;
  for (int s = 0; s < samples; ++s) {
    MatrixTuple x = random_tuple(f.grid(), n, sample_radius(rng), rng);
    const Mat u = random_partial_isometry_point(static_cast<Index>(gp) * n, static_cast<Index>(g) * n,
                                                static_cast<Index>(n) * k, rng());
    const double inner = linalg::op_norm(series_eval(f, x));
    double outer = 0.0;
    const Mat xf = x.flatten();
    for (int t = 0; t < circle_points; ++t) {
      const Complex z = std::polar(1.0, 2 * pi * t / circle_points);
      const Mat w = moebius_apply_point(xf, z * u).value;
      outer = std::max(outer, linalg::op_norm(series_eval(f, MatrixTuple::from_flat(f.grid(), w))));
    }
    ++r.samples;
    r.max_interior = std::max(r.max_interior, inner);
    r.max_boundary = std::max(r.max_boundary, outer);
    const double gap = inner - outer;
    if (s == 0 || gap > r.worst_gap) r.worst_gap = gap;
    if (gap > 1e-7) r.pass = false;
  }
  return r;
}

}  // namespace ncball
