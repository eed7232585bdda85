#include "ncball/ncpoly.hpp"

#include <algorithm>
#include <cmath>

#include "ncball/linalg.hpp"

namespace ncball {

Word concat(const Word& a, const Word& b) {
  Word out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<Word> words_of_length(const Grid& grid, int length) {
  std::vector<Word> out{Word{}};
  for (int k = 0; k < length; ++k) {
    std::vector<Word> next;
    next.reserve(out.size() * grid.size());
    for (const auto& w : out) {
      for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
          Word v = w;
          v.push_back({r, c, false});
          next.push_back(std::move(v));
        }
      }
    }
    out = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------- MatrixTuple

MatrixTuple::MatrixTuple(Grid grid, Index level)
    : grid_(grid), level_(level), entries_(grid.size(), Mat::Zero(level, level)) {}

MatrixTuple::MatrixTuple(Grid grid, std::vector<Mat> entries) : grid_(grid), entries_(std::move(entries)) {
  if (static_cast<int>(entries_.size()) != grid_.size()) {
    throw ShapeError("MatrixTuple: expected " + std::to_string(grid_.size()) + " entries");
  }
  level_ = entries_.empty() ? 0 : entries_.front().rows();
  for (const auto& e : entries_) {
    if (e.rows() != level_ || e.cols() != level_) throw ShapeError("MatrixTuple: entries must be square of equal size");
  }
}

MatrixTuple MatrixTuple::from_flat(Grid grid, const Mat& flat) {
  if (flat.rows() % grid.rows != 0 || flat.cols() % grid.cols != 0 ||
      flat.rows() / grid.rows != flat.cols() / grid.cols) {
    throw ShapeError("MatrixTuple::from_flat: block matrix does not match grid " + to_string(grid));
  }
  const Index n = flat.rows() / grid.rows;
  std::vector<Mat> entries;
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) entries.push_back(flat.block(r * n, c * n, n, n));
  return MatrixTuple(grid, std::move(entries));
}

std::size_t MatrixTuple::index(int row, int col) const {
  if (row < 0 || row >= grid_.rows || col < 0 || col >= grid_.cols) {
    throw ShapeError("MatrixTuple: letter index out of grid " + to_string(grid_));
  }
  return static_cast<std::size_t>(row * grid_.cols + col);
}

Mat MatrixTuple::flatten() const {
  Mat out(grid_.rows * level_, grid_.cols * level_);
  for (int r = 0; r < grid_.rows; ++r)
    for (int c = 0; c < grid_.cols; ++c) out.block(r * level_, c * level_, level_, level_) = at(r, c);
  return out;
}

double MatrixTuple::norm() const { return linalg::op_norm(flatten()); }

MatrixTuple MatrixTuple::operator+(const MatrixTuple& o) const {
  if (!(grid_ == o.grid_) || level_ != o.level_) throw ShapeError("MatrixTuple: sum of incompatible tuples");
  std::vector<Mat> e(entries_.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = entries_[i] + o.entries_[i];
  return MatrixTuple(grid_, std::move(e));
}

MatrixTuple MatrixTuple::operator*(Complex c) const {
  std::vector<Mat> e(entries_.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = entries_[i] * c;
  return MatrixTuple(grid_, std::move(e));
}

MatrixTuple MatrixTuple::direct_sum(const MatrixTuple& o) const {
  if (!(grid_ == o.grid_)) throw ShapeError("MatrixTuple: direct sum of tuples on different grids");
  const Index n = level_ + o.level_;
  std::vector<Mat> e(entries_.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = Mat::Zero(n, n);
    e[i].topLeftCorner(level_, level_) = entries_[i];
    e[i].bottomRightCorner(o.level_, o.level_) = o.entries_[i];
  }
  return MatrixTuple(grid_, std::move(e));
}

MatrixTuple MatrixTuple::conjugate(const Mat& s, const Mat& s_inv) const {
  std::vector<Mat> e(entries_.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = s_inv * entries_[i] * s;
  return MatrixTuple(grid_, std::move(e));
}

// --------------------------------------------------------------- NCPolynomial

NCPolynomial::NCPolynomial(Grid grid, Shape shape) : grid_(grid), shape_(shape) {
  if (grid.rows < 1 || grid.cols < 1) throw ShapeError("NCPolynomial: grid must be at least 1x1");
  if (shape.rows < 0 || shape.cols < 0) throw ShapeError("NCPolynomial: negative shape");
}

NCPolynomial NCPolynomial::constant(Grid grid, const Mat& c) {
  NCPolynomial p(grid, {static_cast<int>(c.rows()), static_cast<int>(c.cols())});
  p.add_term({}, c);
  return p;
}

NCPolynomial NCPolynomial::monomial(Grid grid, const Word& w, const Mat& c) {
  NCPolynomial p(grid, {static_cast<int>(c.rows()), static_cast<int>(c.cols())});
  p.add_term(w, c);
  return p;
}

NCPolynomial NCPolynomial::letter(Grid grid, int row, int col) {
  return monomial(grid, {{row, col, false}}, Mat::Identity(1, 1));
}

NCPolynomial NCPolynomial::linear(Grid grid, const std::vector<Mat>& coeffs) {
  if (static_cast<int>(coeffs.size()) != grid.size()) throw ShapeError("NCPolynomial::linear: coefficient count");
  if (coeffs.empty()) throw ShapeError("NCPolynomial::linear: empty grid");
  NCPolynomial p(grid, {static_cast<int>(coeffs[0].rows()), static_cast<int>(coeffs[0].cols())});
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) p.add_term({{r, c, false}}, coeffs[r * grid.cols + c]);
  return p;
}

void NCPolynomial::add_term(const Word& w, const Mat& c) {
  if (c.rows() != shape_.rows || c.cols() != shape_.cols) {
    throw ShapeError("NCPolynomial: coefficient is " + std::to_string(c.rows()) + "x" + std::to_string(c.cols()) +
                     ", expected " + to_string(shape_));
  }
  for (const auto& l : w) {
    if (l.row < 0 || l.row >= grid_.rows || l.col < 0 || l.col >= grid_.cols) {
      throw ShapeError("NCPolynomial: letter index out of grid " + to_string(grid_));
    }
  }
  auto it = terms_.find(w);
  if (it == terms_.end()) {
    if (c.size() > 0 && linalg::op_norm(c) > kDropTol) terms_.emplace(w, c);
    return;
  }
  it->second += c;
  if (it->second.size() == 0 || linalg::op_norm(it->second) <= kDropTol) terms_.erase(it);
}

int NCPolynomial::degree() const {
  if (terms_.empty()) return -1;
  return static_cast<int>(terms_.rbegin()->first.size());
}

bool NCPolynomial::has_star() const {
  for (const auto& [w, c] : terms_)
    for (const auto& l : w)
      if (l.star) return true;
  return false;
}

Mat NCPolynomial::coeff(const Word& w) const {
  auto it = terms_.find(w);
  if (it == terms_.end()) return Mat::Zero(shape_.rows, shape_.cols);
  return it->second;
}

NCPolynomial NCPolynomial::homogeneous_part(int alpha) const {
  NCPolynomial out(grid_, shape_);
  for (const auto& [w, c] : terms_)
    if (static_cast<int>(w.size()) == alpha) out.terms_.emplace(w, c);
  return out;
}

NCPolynomial NCPolynomial::truncated(int degree) const {
  NCPolynomial out(grid_, shape_);
  for (const auto& [w, c] : terms_)
    if (static_cast<int>(w.size()) <= degree) out.terms_.emplace(w, c);
  return out;
}

double NCPolynomial::coefficient_norm_sq() const {
  double s = 0.0;
  for (const auto& [w, c] : terms_) {
    const double n = linalg::op_norm(c);
    s += n * n;
  }
  return s;
}

double NCPolynomial::max_coeff_norm() const {
  double m = 0.0;
  for (const auto& [w, c] : terms_) m = std::max(m, linalg::op_norm(c));
  return m;
}

void NCPolynomial::require_compatible(const NCPolynomial& o, const char* what) const {
  if (!(grid_ == o.grid_)) throw ShapeError(std::string(what) + ": grids differ");
  if (!(shape_ == o.shape_)) throw ShapeError(std::string(what) + ": coefficient shapes differ");
}

NCPolynomial NCPolynomial::operator+(const NCPolynomial& o) const {
  require_compatible(o, "polynomial sum");
  NCPolynomial out = *this;
  for (const auto& [w, c] : o.terms_) out.add_term(w, c);
  return out;
}

NCPolynomial NCPolynomial::operator-(const NCPolynomial& o) const {
  require_compatible(o, "polynomial difference");
  NCPolynomial out = *this;
  for (const auto& [w, c] : o.terms_) out.add_term(w, -c);
  return out;
}

NCPolynomial NCPolynomial::operator-() const { return *this * Complex(-1.0); }

NCPolynomial NCPolynomial::operator*(const NCPolynomial& o) const { return mul_truncated(o, -1); }

NCPolynomial NCPolynomial::mul_truncated(const NCPolynomial& o, int max_degree) const {
  if (!(grid_ == o.grid_)) throw ShapeError("polynomial product: grids differ");
  const bool scalar_left = shape_.rows == 1 && shape_.cols == 1;
  const bool scalar_right = o.shape_.rows == 1 && o.shape_.cols == 1;
  Shape out_shape;
  if (shape_.cols == o.shape_.rows) {
    out_shape = {shape_.rows, o.shape_.cols};
  } else if (scalar_left) {
    out_shape = o.shape_;
  } else if (scalar_right) {
    out_shape = shape_;
  } else {
    throw ShapeError("polynomial product: " + to_string(shape_) + " times " + to_string(o.shape_));
  }
  const bool matrix_product = shape_.cols == o.shape_.rows;
  NCPolynomial out(grid_, out_shape);
  for (const auto& [u, a] : terms_) {
    for (const auto& [v, b] : o.terms_) {
      if (max_degree >= 0 && static_cast<int>(u.size() + v.size()) > max_degree) continue;
      Mat c;
      if (matrix_product) {
        c = a * b;
      } else if (scalar_left) {
        c = a(0, 0) * b;
      } else {
        c = a * b(0, 0);
      }
      out.add_term(concat(u, v), c);
    }
  }
  return out;
}

NCPolynomial NCPolynomial::operator*(Complex c) const {
  NCPolynomial out(grid_, shape_);
  for (const auto& [w, a] : terms_) out.add_term(w, a * c);
  return out;
}

NCPolynomial NCPolynomial::left_mul(const Mat& c) const {
  if (c.cols() != shape_.rows) throw ShapeError("left_mul: shape mismatch");
  NCPolynomial out(grid_, {static_cast<int>(c.rows()), shape_.cols});
  for (const auto& [w, a] : terms_) out.add_term(w, c * a);
  return out;
}

NCPolynomial NCPolynomial::right_mul(const Mat& d) const {
  if (d.rows() != shape_.cols) throw ShapeError("right_mul: shape mismatch");
  NCPolynomial out(grid_, {shape_.rows, static_cast<int>(d.cols())});
  for (const auto& [w, a] : terms_) out.add_term(w, a * d);
  return out;
}

NCPolynomial NCPolynomial::entry(int i, int j) const { return block(i, j, 1, 1); }

NCPolynomial NCPolynomial::block(int row, int col, int rows, int cols) const {
  if (row < 0 || col < 0 || row + rows > shape_.rows || col + cols > shape_.cols) {
    throw ShapeError("NCPolynomial::block: out of range");
  }
  NCPolynomial out(grid_, {rows, cols});
  for (const auto& [w, a] : terms_) out.add_term(w, a.block(row, col, rows, cols));
  return out;
}

NCPolynomial NCPolynomial::involution() const {
  NCPolynomial out(grid_, {shape_.cols, shape_.rows});
  for (const auto& [w, a] : terms_) {
    Word r(w.rbegin(), w.rend());
    for (auto& l : r) l.star = !l.star;
    out.add_term(r, a.adjoint());
  }
  return out;
}

double NCPolynomial::distance(const NCPolynomial& o) const {
  require_compatible(o, "polynomial distance");
  return (*this - o).max_coeff_norm();
}

bool NCPolynomial::operator==(const NCPolynomial& o) const {
  if (!(grid_ == o.grid_) || !(shape_ == o.shape_) || terms_.size() != o.terms_.size()) return false;
  auto a = terms_.begin();
  auto b = o.terms_.begin();
  for (; a != terms_.end(); ++a, ++b) {
    if (a->first != b->first || a->second != b->second) return false;
  }
  return true;
}

// ----------------------------------------------------------------- evaluation

Mat eval_word(const Word& w, const MatrixTuple& x) {
  Mat out = Mat::Identity(x.level(), x.level());
  for (const auto& l : w) {
    if (l.star) {
      out = out * x.at(l.row, l.col).adjoint();
    } else {
      out = out * x.at(l.row, l.col);
    }
  }
  return out;
}

Mat eval_poly(const NCPolynomial& p, const MatrixTuple& x) {
  if (!(p.grid() == x.grid())) {
    throw ShapeError("eval_poly: polynomial grid " + to_string(p.grid()) + " vs point grid " + to_string(x.grid()));
  }
  const Index n = x.level();
  Mat out = Mat::Zero(p.shape().rows * n, p.shape().cols * n);
  // Words arrive in graded-lex order, so a word's longest proper prefix is
  // usually cached already.
  std::map<Word, Mat, GradedLex> cache;
  for (const auto& [w, a] : p.terms()) {
    Mat value;
    if (w.empty()) {
      value = Mat::Identity(n, n);
    } else {
      Word prefix(w.begin(), w.end() - 1);
      auto it = cache.find(prefix);
      Mat base = it != cache.end() ? it->second : eval_word(prefix, x);
      const Letter& l = w.back();
      value = l.star ? Mat(base * x.at(l.row, l.col).adjoint()) : Mat(base * x.at(l.row, l.col));
    }
    out += linalg::kron(a, value);
    cache.emplace(w, std::move(value));
  }
  return out;
}

// ------------------------------------------------------------ TruncatedSeries

TruncatedSeries::TruncatedSeries(Grid grid, Shape shape, int degree) : grid_(grid), shape_(shape) {
  if (degree < 0) throw PreconditionError("TruncatedSeries: degree must be non-negative");
  parts_.assign(degree + 1, NCPolynomial(grid, shape));
}

TruncatedSeries TruncatedSeries::from_polynomial(const NCPolynomial& p, std::optional<int> degree) {
  TruncatedSeries s(p.grid(), p.shape(), degree.value_or(std::max(0, p.degree())));
  s.add(p);
  return s;
}

TruncatedSeries TruncatedSeries::identity(Grid grid, int degree) {
  TruncatedSeries s(grid, {grid.rows, grid.cols}, degree);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      Mat e = Mat::Zero(grid.rows, grid.cols);
      e(r, c) = 1.0;
      s.parts_[1].add_term({{r, c, false}}, e);
    }
  }
  return s;
}

const NCPolynomial& TruncatedSeries::part(int alpha) const {
  if (alpha < 0 || alpha > degree()) {
    throw PreconditionError("homogeneous part " + std::to_string(alpha) + " out of range 0.." +
                            std::to_string(degree()));
  }
  return parts_[alpha];
}

void TruncatedSeries::add(const NCPolynomial& p) {
  if (!(p.grid() == grid_) || !(p.shape() == shape_)) throw ShapeError("TruncatedSeries::add: incompatible polynomial");
  for (const auto& [w, c] : p.terms()) {
    if (static_cast<int>(w.size()) <= degree()) parts_[w.size()].add_term(w, c);
  }
}

NCPolynomial TruncatedSeries::to_polynomial() const {
  NCPolynomial out(grid_, shape_);
  for (const auto& p : parts_) out = out + p;
  return out;
}

TruncatedSeries TruncatedSeries::with_degree(int degree) const {
  TruncatedSeries out(grid_, shape_, degree);
  for (int a = 0; a <= std::min(degree, this->degree()); ++a) out.parts_[a] = parts_[a];
  return out;
}

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& o) const {
  const int d = std::min(degree(), o.degree());
  TruncatedSeries out(grid_, shape_, d);
  for (int a = 0; a <= d; ++a) out.parts_[a] = parts_[a] + o.parts_[a];
  return out;
}

TruncatedSeries TruncatedSeries::operator-(const TruncatedSeries& o) const { return *this + o * Complex(-1.0); }

TruncatedSeries TruncatedSeries::operator*(Complex c) const {
  TruncatedSeries out = *this;
  for (auto& p : out.parts_) p = p * c;
  return out;
}

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& o) const {
  const int d = std::min(degree(), o.degree());
  NCPolynomial prod = to_polynomial().mul_truncated(o.to_polynomial(), d);
  TruncatedSeries out(grid_, prod.shape(), d);
  out.add(prod);
  return out;
}

TruncatedSeries TruncatedSeries::left_mul(const Mat& c) const {
  TruncatedSeries out(grid_, {static_cast<int>(c.rows()), shape_.cols}, degree());
  for (int a = 0; a <= degree(); ++a) out.parts_[a] = parts_[a].left_mul(c);
  return out;
}

TruncatedSeries TruncatedSeries::right_mul(const Mat& d) const {
  TruncatedSeries out(grid_, {shape_.rows, static_cast<int>(d.cols())}, degree());
  for (int a = 0; a <= degree(); ++a) out.parts_[a] = parts_[a].right_mul(d);
  return out;
}

TruncatedSeries TruncatedSeries::block(int row, int col, int rows, int cols) const {
  TruncatedSeries out(grid_, {rows, cols}, degree());
  for (int a = 0; a <= degree(); ++a) out.parts_[a] = parts_[a].block(row, col, rows, cols);
  return out;
}

double TruncatedSeries::distance(const TruncatedSeries& o) const {
  if (!(grid_ == o.grid_) || !(shape_ == o.shape_)) throw ShapeError("series distance: incompatible series");
  double m = 0.0;
  for (int a = 0; a <= std::max(degree(), o.degree()); ++a) {
    NCPolynomial zero(grid_, shape_);
    const NCPolynomial& p = a <= degree() ? parts_[a] : zero;
    const NCPolynomial& q = a <= o.degree() ? o.parts_[a] : zero;
    m = std::max(m, p.distance(q));
  }
  return m;
}

Mat series_eval(const TruncatedSeries& f, const MatrixTuple& x) {
  if (!(f.grid() == x.grid())) throw ShapeError("series_eval: grid mismatch");
  const Index n = x.level();
  Mat out = Mat::Zero(f.shape().rows * n, f.shape().cols * n);
  for (const auto& p : f.parts()) out += eval_poly(p, x);
  return out;
}

double series_tail_indicator(const TruncatedSeries& f, const MatrixTuple& x) {
  for (int a = f.degree(); a >= 0; --a) {
    if (!f.part(a).is_zero()) return linalg::op_norm(eval_poly(f.part(a), x));
  }
  return 0.0;
}

NilpotencyCheck check_nilpotent(const MatrixTuple& x, int order, double tol) {
  NilpotencyCheck out;
  if (order < 0) throw PreconditionError("check_nilpotent: negative order");
  const Index n = x.level();
  // reach[r] = Σ_{|w|=r} w(X) w(X)*.
  std::vector<Mat> reach{Mat::Identity(n, n)};
  for (int r = 1; r <= order; ++r) {
    Mat next = Mat::Zero(n, n);
    for (const auto& e : x.entries()) next += e * reach.back() * e.adjoint();
    reach.push_back(std::move(next));
  }
  const double scale = std::pow(std::max(1.0, x.norm()), order);
  if (std::sqrt(std::max(0.0, reach[order].trace().real())) <= tol * scale) return out;

  // Greedy descent: extend the prefix by the letter keeping the most mass.
  Mat prefix = Mat::Identity(n, n);
  for (int k = 1; k <= order; ++k) {
    double best = -1.0;
    Letter best_letter{};
    for (int r = 0; r < x.grid().rows; ++r) {
      for (int c = 0; c < x.grid().cols; ++c) {
        Mat p = prefix * x.at(r, c);
        const double mass = (p * reach[order - k] * p.adjoint()).trace().real();
        if (mass > best) {
          best = mass;
          best_letter = {r, c, false};
        }
      }
    }
    prefix = prefix * x.at(best_letter);
    out.witness.push_back(best_letter);
  }
  out.nilpotent = false;
  out.witness_norm = linalg::op_norm(prefix);
  return out;
}

Mat eval_nilpotent(const TruncatedSeries& f, const MatrixTuple& x, int order, double tol) {
  if (!(f.grid() == x.grid())) throw ShapeError("eval_nilpotent: grid mismatch");
  auto check = check_nilpotent(x, order, tol);
  if (!check.nilpotent) {
    std::string w;
    for (const auto& l : check.witness) w += "x" + std::to_string(l.row + 1) + "_" + std::to_string(l.col + 1) + " ";
    throw PreconditionError("eval_nilpotent: point is not nilpotent of order " + std::to_string(order) +
                            "; word " + w + "has norm " + std::to_string(check.witness_norm));
  }
  const Index n = x.level();
  Mat out = Mat::Zero(f.shape().rows * n, f.shape().cols * n);
  for (int a = 0; a <= std::min(f.degree(), order - 1); ++a) out += eval_poly(f.part(a), x);
  return out;
}

TruncatedSeries compose_series(const TruncatedSeries& h, const TruncatedSeries& f) {
  if (h.grid().rows != f.shape().rows || h.grid().cols != f.shape().cols) {
    throw ShapeError("compose_series: outer grid " + to_string(h.grid()) + " does not match inner shape " +
                     to_string(f.shape()));
  }
  const int d = std::min(h.degree(), f.degree());
  const NCPolynomial inner = f.to_polynomial();
  if (inner.has_star()) throw PreconditionError("compose_series: inner series contains starred letters");

  std::vector<NCPolynomial> entries;
  for (int r = 0; r < f.shape().rows; ++r)
    for (int c = 0; c < f.shape().cols; ++c) entries.push_back(inner.entry(r, c));

  NCPolynomial one = NCPolynomial::constant(f.grid(), Mat::Identity(1, 1));
  std::map<Word, NCPolynomial, GradedLex> products;
  products.emplace(Word{}, one);

  TruncatedSeries out(f.grid(), h.shape(), d);
  for (int a = 0; a <= h.degree(); ++a) {
    for (const auto& [w, coeff] : h.part(a).terms()) {
      if (std::any_of(w.begin(), w.end(), [](const Letter& l) { return l.star; })) {
        throw PreconditionError("compose_series: outer series contains starred letters");
      }
      // Build the product of substituted entries prefix by prefix.
      Word prefix;
      const NCPolynomial* current = &products.at(Word{});
      for (const auto& l : w) {
        prefix.push_back(l);
        auto it = products.find(prefix);
        if (it == products.end()) {
          NCPolynomial next = current->mul_truncated(entries[l.row * f.shape().cols + l.col], d);
          it = products.emplace(prefix, std::move(next)).first;
        }
        current = &it->second;
      }
      NCPolynomial scaled(f.grid(), h.shape());
      for (const auto& [v, s] : current->terms()) scaled.add_term(v, coeff * s(0, 0));
      out.add(scaled);
    }
  }
  return out;
}

CoefficientBound coefficient_bound(const TruncatedSeries& f, int d) {
  CoefficientBound out;
  out.bound = d;
  for (const auto& p : f.parts()) out.sum += p.coefficient_norm_sq();
  out.pass = out.sum <= d * (1.0 + 1e-12);
  return out;
}

}  // namespace ncball
