#include "ncball/moebius.hpp"

#include "ncball/linalg.hpp"

namespace ncball {

namespace {

Mat defect_root(const Mat& m) {
  const Index k = m.rows();
  return linalg::psd_sqrt(Mat::Identity(k, k) - m, 1e-12);
}

MoebiusValue apply_with_roots(const Mat& v, const Mat& left, const Mat& right, const Mat& u) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) throw ShapeError("moebius: point and center have different sizes");
  const Index k = u.cols();
  Mat core = Mat::Identity(k, k) - v.adjoint() * u;
  Eigen::PartialPivLU<Mat> lu(core);
  MoebiusValue out;
  out.condition = linalg::condition_number(core);
  out.ill_conditioned = out.condition > 1e8;
  out.value = v - left * u * lu.solve(right);
  return out;
}

}  // namespace

MoebiusParams::MoebiusParams(const Mat& v) : v_(v) {
  if (linalg::op_norm(v) >= 1.0) throw PreconditionError("Moebius center must satisfy ‖v‖ < 1");
  left_root_ = defect_root(v * v.adjoint());
  right_root_ = defect_root(v.adjoint() * v);
}

MoebiusValue moebius_apply(const MoebiusParams& params, const Mat& u) {
  const Mat& v = params.v();
  if (v.rows() == 0 || u.rows() % v.rows() != 0) throw ShapeError("moebius_apply: point size is not a multiple of d'");
  const Index n = u.rows() / v.rows();
  if (u.cols() != v.cols() * n) throw ShapeError("moebius_apply: point must be d'n × dn");
  const Mat id = Mat::Identity(n, n);
  return apply_with_roots(linalg::kron(v, id), linalg::kron(params.left_root(), id),
                          linalg::kron(params.right_root(), id), u);
}

MoebiusValue moebius_apply_point(const Mat& v, const Mat& u) {
  if (linalg::op_norm(v) >= 1.0) throw PreconditionError("Moebius center must satisfy ‖V‖ < 1");
  return apply_with_roots(v, defect_root(v * v.adjoint()), defect_root(v.adjoint() * v), u);
}

InvolutionReport verify_involution(const MoebiusParams& params, const Mat& u) {
  InvolutionReport r;
  const Mat once = moebius_apply(params, u).value;
  const Mat twice = moebius_apply(params, once).value;
  r.residual = linalg::op_norm(twice - u);
  r.pass = r.residual <= 1e-9;
  return r;
}

Index isometric_rank(const Mat& u, double tol) {
  RealVec s = linalg::singular_values(u);
  Index k = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (std::abs(s(i) - 1.0) <= tol) ++k;
  return k;
}

RankReport verify_rank_preservation(const MoebiusParams& params, const Mat& u, double tol) {
  RankReport r;
  r.before = isometric_rank(u, tol);
  r.after = isometric_rank(moebius_apply(params, u).value, tol);
  r.pass = r.before == r.after;
  return r;
}

TruncatedSeries moebius_compose_series(const MoebiusParams& params, const TruncatedSeries& u, int degree) {
  const Mat& v = params.v();
  if (u.shape().rows != v.rows() || u.shape().cols != v.cols()) {
    throw ShapeError("moebius_compose_series: series shape must match the center");
  }
  const Grid grid = u.grid();
  const Index d = v.cols();
  const TruncatedSeries uu = u.with_degree(degree);
  const Mat c = uu.part(0).constant_term();
  const Mat vc = v.adjoint() * c;
  if (linalg::op_norm(vc) >= 1.0) throw PreconditionError("Neumann expansion invalid: ‖v*u(0)‖ ≥ 1");
  const Mat k = (Mat::Identity(d, d) - vc).inverse();

  // (I − v*u)^{-1} = Σ_j (K v* ũ)^j K with ũ = u − u(0) and K = (I − v*u(0))^{-1}.
  TruncatedSeries centered = uu;
  {
    TruncatedSeries zero_part(grid, uu.shape(), degree);
    zero_part.add(NCPolynomial::constant(grid, c));
    centered = uu - zero_part;
  }
  const TruncatedSeries step = centered.left_mul(k * v.adjoint());
  TruncatedSeries power(grid, {static_cast<int>(d), static_cast<int>(d)}, degree);
  power.add(NCPolynomial::constant(grid, Mat::Identity(d, d)));
  TruncatedSeries sum = power;
  for (int j = 1; j <= degree; ++j) {
    power = step * power;
    sum = sum + power;
  }
  const TruncatedSeries inverse = sum.right_mul(k);

  TruncatedSeries out(grid, uu.shape(), degree);
  out.add(NCPolynomial::constant(grid, v));
  const TruncatedSeries tail = (uu.left_mul(params.left_root()) * inverse).right_mul(params.right_root());
  return out - tail;
}

}  // namespace ncball
