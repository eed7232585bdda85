#include "ncball/balls.hpp"

#include <cmath>

#include "ncball/linalg.hpp"

namespace ncball {

LinearPencil::LinearPencil(Grid grid, std::vector<Mat> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
  if (static_cast<int>(coeffs_.size()) != grid_.size()) {
    throw ShapeError("LinearPencil: expected " + std::to_string(grid_.size()) + " coefficients");
  }
  shape_ = {static_cast<int>(coeffs_[0].rows()), static_cast<int>(coeffs_[0].cols())};
  for (const auto& a : coeffs_) {
    if (a.rows() != shape_.rows || a.cols() != shape_.cols) throw ShapeError("LinearPencil: coefficient shapes differ");
  }
}

LinearPencil LinearPencil::ball_pencil(Grid grid) {
  std::vector<Mat> coeffs;
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      Mat e = Mat::Zero(grid.rows, grid.cols);
      e(r, c) = 1.0;
      coeffs.push_back(e);
    }
  }
  return LinearPencil(grid, std::move(coeffs));
}

LinearPencil LinearPencil::from_polynomial(const NCPolynomial& p) {
  for (const auto& [w, c] : p.terms()) {
    if (w.size() != 1 || w[0].star) throw PreconditionError("LinearPencil: polynomial is not homogeneous linear");
  }
  std::vector<Mat> coeffs;
  for (int r = 0; r < p.grid().rows; ++r)
    for (int c = 0; c < p.grid().cols; ++c) coeffs.push_back(p.coeff({{r, c, false}}));
  return LinearPencil(p.grid(), std::move(coeffs));
}

NCPolynomial LinearPencil::to_polynomial() const { return NCPolynomial::linear(grid_, coeffs_); }

std::string to_string(BallStatus s) {
  switch (s) {
    case BallStatus::interior:
      return "interior";
    case BallStatus::boundary:
      return "boundary";
    case BallStatus::outside:
      return "outside";
  }
  return "unknown";
}

BallVerdict verdict_from_norm(double norm, double tol) {
  BallVerdict v;
  v.norm = norm;
  v.tolerance = tol;
  if (std::abs(norm - 1.0) <= tol) {
    v.status = BallStatus::boundary;
  } else if (norm < 1.0) {
    v.status = BallStatus::interior;
  } else {
    v.status = BallStatus::outside;
  }
  return v;
}

BallVerdict classify_ball(const MatrixTuple& x, double tol) { return verdict_from_norm(x.norm(), tol); }

Mat pencil_eval(const LinearPencil& l, const MatrixTuple& x) {
  if (!(l.grid() == x.grid())) throw ShapeError("pencil_eval: grid mismatch");
  const Index n = x.level();
  Mat out = Mat::Zero(l.shape().rows * n, l.shape().cols * n);
  for (int r = 0; r < l.grid().rows; ++r)
    for (int c = 0; c < l.grid().cols; ++c) out += linalg::kron(l.at(r, c), x.at(r, c));
  return out;
}

BallVerdict pencil_ball_membership(const LinearPencil& l, const MatrixTuple& x, double tol) {
  return verdict_from_norm(linalg::op_norm(pencil_eval(l, x)), tol);
}

Mat monic_eval(const LinearPencil& l, const MatrixTuple& x) {
  if (l.shape().rows != l.shape().cols) throw ShapeError("monic_eval: pencil is not square");
  Mat lx = pencil_eval(l, x);
  return Mat::Identity(lx.rows(), lx.cols()) + lx + lx.adjoint();
}

LmiEmbedReport lmi_embed_check(const LinearPencil& l, const MatrixTuple& x, double tol) {
  if (l.shape().rows != l.shape().cols) throw ShapeError("lmi_embed_check: pencil is not square");
  const Index n = x.level();
  std::vector<Mat> corner;
  for (const auto& e : x.entries()) {
    Mat y = Mat::Zero(2 * n, 2 * n);
    y.topRightCorner(n, n) = e;
    corner.push_back(y);
  }
  MatrixTuple y(x.grid(), std::move(corner));

  LmiEmbedReport out;
  out.min_eigenvalue = linalg::min_eigen(monic_eval(l, y)).value;
  out.pencil_norm = linalg::op_norm(pencil_eval(l, x));
  out.ball_status = verdict_from_norm(out.pencil_norm, tol).status;
  // The spectrum of [[I, C], [C*, I]] is 1 ± σ_i(C), so the LMI boundary
  // sits at min eigenvalue 0.
  if (std::abs(out.min_eigenvalue) <= tol) {
    out.lmi_status = BallStatus::boundary;
  } else if (out.min_eigenvalue > 0.0) {
    out.lmi_status = BallStatus::interior;
  } else {
    out.lmi_status = BallStatus::outside;
  }
  out.agree = out.lmi_status == out.ball_status;
  return out;
}

SemiDistinguishedReport semi_distinguished_check(const MatrixTuple& x, double tol) {
  if (x.grid().cols != 1) throw ShapeError("semi_distinguished_check: expects a column tuple");
  const Index n = x.level();
  Mat gram = Mat::Zero(n, n);
  for (const auto& e : x.entries()) gram += e.adjoint() * e;
  SemiDistinguishedReport out;
  out.projection_defect = linalg::op_norm(gram * gram - gram);
  out.projection = out.projection_defect <= tol;
  RealVec ev = linalg::hermitian_eigenvalues(gram);
  for (Index i = 0; i < ev.size(); ++i)
    if (ev(i) > 0.5) ++out.rank;
  out.member = out.projection && 2 * out.rank >= n;
  return out;
}

}  // namespace ncball
