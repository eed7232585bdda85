#include "ncball/examples.hpp"

#include <cmath>

#include "ncball/io.hpp"

namespace ncball::examples {

namespace {

Mat real_mat(std::initializer_list<std::initializer_list<double>> rows) {
  Mat m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

Mat evaluation_coefficient() { return real_mat({{-4, 3, 2}, {2, -1, 0}}); }

MatrixTuple evaluation_point() {
  MatrixTuple x(Grid{2, 1}, 2);
  x.at(0, 0) = real_mat({{0, 1}, {1, 0}});
  x.at(1, 0) = real_mat({{1, 0}, {0, -1}});
  return x;
}

NCPolynomial evaluation_polynomial() {
  return NCPolynomial::monomial(Grid{2, 1}, {Letter{0, 0, false}, Letter{1, 0, false}}, evaluation_coefficient());
}

Mat evaluation_value() {
  return real_mat({{0, 4, 0, -3, 0, -2}, {-4, 0, 3, 0, 2, 0}, {0, -2, 0, 1, 0, 0}, {2, 0, -1, 0, 0, 0}});
}

LinearPencil distinguished_pencil() {
  const double r = std::sqrt(2.0) / 2.0;
  Mat a = Mat::Zero(4, 3), b = Mat::Zero(4, 3);
  a(0, 0) = 1.0;
  a(1, 1) = r;
  a(3, 2) = r;
  b(1, 0) = r;
  b(2, 1) = 1.0;
  b(3, 2) = r;
  return LinearPencil(Grid{2, 1}, {a, b});
}

MatrixTuple distinguished_shrink_point() {
  MatrixTuple x(Grid{2, 1}, 2);
  x.at(0, 0)(0, 0) = 1.0;
  x.at(1, 0)(1, 0) = 1.0;
  return x;
}

LinearPencil rotated_clinging_pencil(Index extra, Rng& rng) {
  const LinearPencil base = distinguished_pencil();
  const Index rows = base.shape().rows + extra, cols = base.shape().cols + extra;
  const Mat v = random_unitary(rows, rng), u = random_unitary(cols, rng);
  std::vector<Mat> coeffs;
  for (const Mat& a : base.coeffs()) {
    Mat block = Mat::Zero(rows, cols);
    block.topLeftCorner(a.rows(), a.cols()) = a;
    if (extra > 0) block.bottomRightCorner(extra, extra) = random_with_norm(extra, extra, 0.5 / std::sqrt(2.0), rng);
    coeffs.push_back(v * block * u.adjoint());
  }
  return LinearPencil(base.grid(), coeffs);
}

LinearMatrixMap trace_map() {
  const Mat one = Mat::Constant(1, 1, 1.0), zero = Mat::Zero(1, 1);
  return LinearMatrixMap(Grid{2, 2}, {one, zero, zero, one});
}

LinearMatrixMap random_complete_isometry(Grid grid, Index extra_rows, Index extra_cols, Rng& rng) {
  const int count = grid.rows * grid.cols;
  std::vector<Mat> k;
  for (int i = 0; i < count; ++i) k.push_back(random_with_norm(extra_rows, extra_cols, 0.9 / count, rng));
  const LinearMatrixMap phi(grid, k);
  const Mat v = random_unitary(grid.rows + extra_rows, rng);
  const Mat u = random_unitary(grid.cols + extra_cols, rng);
  return assemble_map(v, phi, u, grid);
}

TruncatedSeries rotated_square_map(Complex c, Rng& rng, int degree) {
  const Grid grid{1, 1};
  const Mat v = random_unitary(2, rng), u = random_unitary(2, rng);
  Mat e11 = Mat::Zero(2, 2), e22 = Mat::Zero(2, 2);
  e11(0, 0) = 1.0;
  e22(1, 1) = c;
  NCPolynomial p = NCPolynomial::monomial(grid, {Letter{0, 0, false}}, v * e11 * u.adjoint());
  p.add_term({Letter{0, 0, false}, Letter{0, 0, false}}, v * e22 * u.adjoint());
  return TruncatedSeries::from_polynomial(p, degree);
}

TruncatedSeries rotated_clinging_map(Rng& rng, int degree) {
  const Grid grid{2, 1};
  const Mat w = random_unitary(2, rng), u = random_unitary(2, rng);
  const Mat one = Mat::Identity(1, 1);
  std::vector<NCPolynomial> y;
  for (int i = 0; i < 2; ++i) {
    y.push_back(NCPolynomial::linear(grid, {Mat(u(i, 0) * one), Mat(u(i, 1) * one)}));
  }
  // p(y) = a y_1 + b y_2 y_1 with |a| + |b| = 0.9, so ‖p(Y)‖ ≤ 0.9 on the ball.
  const double split = uniform(rng, 0.2, 0.8);
  const Complex a = 0.9 * split * std::polar(1.0, uniform(rng, 0.0, 2 * M_PI));
  const Complex b = 0.9 * (1.0 - split) * std::polar(1.0, uniform(rng, 0.0, 2 * M_PI));
  NCPolynomial p = y[0] * a + y[1] * y[0] * b;
  const NCPolynomial second = p * y[1];
  NCPolynomial h(grid, Shape{2, 1});
  const Mat w1 = w.col(0), w2 = w.col(1);
  for (const auto& [word, c] : y[0].terms()) h.add_term(word, w1 * c(0, 0));
  for (const auto& [word, c] : second.terms()) h.add_term(word, w2 * c(0, 0));
  return TruncatedSeries::from_polynomial(h, degree);
}

}  // namespace ncball::examples
