#pragma once

// Matrix balls, pencil balls and monic LMI domains.

#include <string>
#include <vector>

#include "ncball/ncpoly.hpp"

namespace ncball {

/// L(x) = Σ A_{jl} x_{jl} with d'×d coefficients on a g'×g grid.
class LinearPencil {
 public:
  LinearPencil() = default;
  LinearPencil(Grid grid, std::vector<Mat> coeffs);

  /// L(x) = Σ E_{jl} x_{jl}, whose ball is the matrix ball itself.
  static LinearPencil ball_pencil(Grid grid);
  /// Reads the degree-1 part of a polynomial (other parts must be zero).
  static LinearPencil from_polynomial(const NCPolynomial& p);

  const Grid& grid() const { return grid_; }
  const Shape& shape() const { return shape_; }
  const Mat& at(int row, int col) const { return coeffs_[row * grid_.cols + col]; }
  const std::vector<Mat>& coeffs() const { return coeffs_; }

  NCPolynomial to_polynomial() const;

 private:
  Grid grid_{};
  Shape shape_{};
  std::vector<Mat> coeffs_;
};

enum class BallStatus { interior, boundary, outside };

std::string to_string(BallStatus s);

struct BallVerdict {
  BallStatus status = BallStatus::interior;
  double norm = 0.0;
  double tolerance = 0.0;
};

inline constexpr double kBallTol = 1e-9;

/// Status of a norm against 1: interior iff norm < 1 − tol, boundary iff
/// |norm − 1| ≤ tol, outside otherwise.
BallVerdict verdict_from_norm(double norm, double tol);

/// Operator norm of the flattened block matrix of X against 1.
BallVerdict classify_ball(const MatrixTuple& x, double tol = kBallTol);

/// Σ A_{jl} ⊗ X_{jl}.
Mat pencil_eval(const LinearPencil& l, const MatrixTuple& x);

BallVerdict pencil_ball_membership(const LinearPencil& l, const MatrixTuple& x, double tol = kBallTol);

/// I + L(X) + L(X)* for a square pencil.
Mat monic_eval(const LinearPencil& l, const MatrixTuple& x);

struct LmiEmbedReport {
  double min_eigenvalue = 0.0;  // of I + L(Y) + L(Y)* at Y = [[0, X], [0, 0]]
  double pencil_norm = 0.0;     // ‖L(X)‖
  BallStatus lmi_status = BallStatus::interior;
  BallStatus ball_status = BallStatus::interior;
  bool agree = true;
};

/// Places X in the corner of a tuple at level 2n and compares positivity of
/// the monic pencil there with membership of X in the pencil ball.
LmiEmbedReport lmi_embed_check(const LinearPencil& l, const MatrixTuple& x, double tol = kBallTol);

struct SemiDistinguishedReport {
  bool projection = false;  // Σ X_j* X_j is an orthogonal projection
  Index rank = 0;
  bool member = false;      // projection of rank ≥ n/2
  double projection_defect = 0.0;
};

/// Membership of a column tuple (g'×1 grid) in the semi-distinguished
/// boundary: Σ X_j* X_j is a projection of rank at least n/2.
SemiDistinguishedReport semi_distinguished_check(const MatrixTuple& x, double tol = kBallTol);

}  // namespace ncball
