#pragma once

// Free-algebra data model: letters on a g'×g grid, words, polynomials with
// matrix coefficients, truncated series and matrix-tuple points.
//
// Indices are 0-based in memory. The text form (see io.hpp) is 1-based.
// Evaluation convention: p(X) = Σ a_w ⊗ w(X), coefficient on the LEFT.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ncball/types.hpp"

namespace ncball {

struct Letter {
  int row = 0;
  int col = 0;
  bool star = false;

  auto operator<=>(const Letter&) const = default;
};

using Word = std::vector<Letter>;

/// Graded lexicographic order: shorter words first, then letters compared
/// row-major (row, col), unstarred before starred.
struct GradedLex {
  bool operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

Word concat(const Word& a, const Word& b);

/// Every word of exactly the given length over the grid (no stars), in
/// graded-lex order.
std::vector<Word> words_of_length(const Grid& grid, int length);

/// A g'×g array of n×n matrices.
class MatrixTuple {
 public:
  MatrixTuple() = default;
  MatrixTuple(Grid grid, Index level);  // zero tuple
  MatrixTuple(Grid grid, std::vector<Mat> entries);

  /// Splits a g'n×gn block matrix into its n×n blocks.
  static MatrixTuple from_flat(Grid grid, const Mat& flat);

  const Grid& grid() const { return grid_; }
  Index level() const { return level_; }
  const Mat& at(int row, int col) const { return entries_[index(row, col)]; }
  Mat& at(int row, int col) { return entries_[index(row, col)]; }
  const Mat& at(const Letter& l) const { return at(l.row, l.col); }
  const std::vector<Mat>& entries() const { return entries_; }

  /// Block matrix [X_{jl}] of size g'n × gn (row-major over (j, l)).
  Mat flatten() const;
  double norm() const;

  MatrixTuple operator+(const MatrixTuple& o) const;
  MatrixTuple operator*(Complex c) const;

  /// Entry-wise X_{jl} ⊕ Y_{jl}.
  MatrixTuple direct_sum(const MatrixTuple& o) const;

  /// Entry-wise similarity S⁻¹ X_{jl} S given S and S⁻¹.
  MatrixTuple conjugate(const Mat& s, const Mat& s_inv) const;

 private:
  std::size_t index(int row, int col) const;

  Grid grid_{};
  Index level_ = 0;
  std::vector<Mat> entries_;
};

/// Finite sum of words with d'×d coefficients. Starred letters are allowed;
/// a polynomial without them is an ordinary (analytic) NC polynomial.
class NCPolynomial {
 public:
  using TermMap = std::map<Word, Mat, GradedLex>;

  static constexpr double kDropTol = 1e-14;

  NCPolynomial() = default;
  NCPolynomial(Grid grid, Shape shape);

  static NCPolynomial constant(Grid grid, const Mat& c);
  static NCPolynomial monomial(Grid grid, const Word& w, const Mat& c);
  /// Scalar (1×1) polynomial x_{row,col}.
  static NCPolynomial letter(Grid grid, int row, int col);
  /// Degree-1 polynomial Σ A_{jl} x_{jl} from coefficients in row-major order.
  static NCPolynomial linear(Grid grid, const std::vector<Mat>& coeffs);

  const Grid& grid() const { return grid_; }
  const Shape& shape() const { return shape_; }
  const TermMap& terms() const { return terms_; }

  /// Adds c to the coefficient of w, dropping it when it cancels.
  void add_term(const Word& w, const Mat& c);

  bool is_zero() const { return terms_.empty(); }
  /// Highest word length present; -1 for the zero polynomial.
  int degree() const;
  bool has_star() const;
  Mat coeff(const Word& w) const;
  Mat constant_term() const { return coeff({}); }
  NCPolynomial homogeneous_part(int alpha) const;
  /// Terms of length ≤ degree.
  NCPolynomial truncated(int degree) const;
  /// Σ ‖a_w‖² with operator norms.
  double coefficient_norm_sq() const;
  /// max ‖a_w‖ over terms.
  double max_coeff_norm() const;

  NCPolynomial operator+(const NCPolynomial& o) const;
  NCPolynomial operator-(const NCPolynomial& o) const;
  NCPolynomial operator-() const;
  /// Product with coefficient product a_u b_v on the word uv.
  NCPolynomial operator*(const NCPolynomial& o) const;
  NCPolynomial operator*(Complex c) const;

  /// Product keeping only words of length ≤ max_degree.
  NCPolynomial mul_truncated(const NCPolynomial& o, int max_degree) const;

  /// C·p and p·D on coefficients.
  NCPolynomial left_mul(const Mat& c) const;
  NCPolynomial right_mul(const Mat& d) const;

  /// Entry (i, j) of every coefficient as a scalar polynomial.
  NCPolynomial entry(int i, int j) const;
  /// Coefficient-wise sub-block.
  NCPolynomial block(int row, int col, int rows, int cols) const;

  /// Anti-automorphism: reverses words, toggles stars, adjoints coefficients.
  NCPolynomial involution() const;

  /// max ‖a_w − b_w‖ over the union of supports.
  double distance(const NCPolynomial& o) const;

  bool operator==(const NCPolynomial& o) const;

 private:
  void require_compatible(const NCPolynomial& o, const char* what) const;

  Grid grid_{};
  Shape shape_{};
  TermMap terms_;
};

using StarPolynomial = NCPolynomial;

/// Σ_w a_w ⊗ w(X); starred letters evaluate to X_{jl}*. Empty word ↦ I_n.
Mat eval_poly(const NCPolynomial& p, const MatrixTuple& x);

/// Product of the letters of w at X (identity for the empty word).
Mat eval_word(const Word& w, const MatrixTuple& x);

/// Homogeneous parts f^(0), …, f^(D) of an NC power series.
class TruncatedSeries {
 public:
  TruncatedSeries() = default;
  TruncatedSeries(Grid grid, Shape shape, int degree);

  /// Splits a polynomial by degree; degree defaults to deg p (at least 0).
  static TruncatedSeries from_polynomial(const NCPolynomial& p, std::optional<int> degree = {});
  /// f(x) = x on the grid: the coefficient of x_{jl} is E_{jl} (g'×g shape).
  static TruncatedSeries identity(Grid grid, int degree = 1);

  const Grid& grid() const { return grid_; }
  const Shape& shape() const { return shape_; }
  int degree() const { return static_cast<int>(parts_.size()) - 1; }
  const NCPolynomial& part(int alpha) const;
  const std::vector<NCPolynomial>& parts() const { return parts_; }

  /// Adds a polynomial; its terms are routed to the matching parts and
  /// terms longer than the truncation degree are discarded.
  void add(const NCPolynomial& p);

  NCPolynomial to_polynomial() const;
  TruncatedSeries with_degree(int degree) const;

  TruncatedSeries operator+(const TruncatedSeries& o) const;
  TruncatedSeries operator-(const TruncatedSeries& o) const;
  TruncatedSeries operator*(Complex c) const;
  /// Truncated product; degree is min of the operands.
  TruncatedSeries operator*(const TruncatedSeries& o) const;
  TruncatedSeries left_mul(const Mat& c) const;
  TruncatedSeries right_mul(const Mat& d) const;
  TruncatedSeries block(int row, int col, int rows, int cols) const;

  double distance(const TruncatedSeries& o) const;

 private:
  Grid grid_{};
  Shape shape_{};
  std::vector<NCPolynomial> parts_;
};

/// Σ_{α≤D} f^(α)(X), summed in increasing α.
Mat series_eval(const TruncatedSeries& f, const MatrixTuple& x);

/// Norm of the highest nonzero homogeneous part at X. Used as a heuristic
/// indicator of the neglected tail; it is not a bound.
double series_tail_indicator(const TruncatedSeries& f, const MatrixTuple& x);

/// Outcome of a nilpotency check: words of length `order` vanish at X.
struct NilpotencyCheck {
  bool nilpotent = true;
  Word witness;  // a word of length `order` with a nonzero value
  double witness_norm = 0.0;
};

/// Decides whether every word of length `order` vanishes at X, using the
/// positive map B ↦ Σ X_j B X_j* so no enumeration of words is needed.
NilpotencyCheck check_nilpotent(const MatrixTuple& x, int order, double tol = 1e-12);

/// Exact value of f at X when all words of length ≥ order vanish. Throws
/// PreconditionError naming a witness word otherwise.
Mat eval_nilpotent(const TruncatedSeries& f, const MatrixTuple& x, int order, double tol = 1e-12);

/// h∘f: each letter x_{ij} of h is replaced by the scalar series in entry
/// (i, j) of f. Requires h's grid to equal f's coefficient shape; the result
/// lives on f's grid with h's coefficient shape and is truncated at
/// min(deg h, deg f).
TruncatedSeries compose_series(const TruncatedSeries& h, const TruncatedSeries& f);

struct CoefficientBound {
  double sum = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Σ_w ‖a_w‖² against the bound d (a necessary condition for a
/// contraction-valued map with d columns).
CoefficientBound coefficient_bound(const TruncatedSeries& f, int d);

}  // namespace ncball
