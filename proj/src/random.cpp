#include "ncball/random.hpp"

#include <cmath>
#include <functional>

#include "ncball/linalg.hpp"

namespace ncball {

std::uint64_t stable_hash(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view name) { return seed ^ stable_hash(name); }

double uniform(Rng& rng, double lo, double hi) {
  // 53 random mantissa bits; avoids distribution implementation differences.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

namespace {

double standard_normal(Rng& rng) {
  // Box–Muller on our own uniforms for cross-platform reproducibility.
  double u1 = uniform(rng);
  while (u1 <= 0.0) u1 = uniform(rng);
  const double u2 = uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

Mat ginibre(Index rows, Index cols, Rng& rng) {
  Mat m(rows, cols);
  const double s = std::sqrt(0.5);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = standard_normal(rng) * s;
      const double im = standard_normal(rng) * s;
      m(i, j) = {re, im};
    }
  return m;
}

Mat random_unitary(Index n, Rng& rng) {
  Eigen::HouseholderQR<Mat> qr(ginibre(n, n, rng));
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i) {
    const double a = std::abs(r(i, i));
    if (a > 0.0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

Mat random_isometry(Index rows, Index cols, Rng& rng) {
  if (cols > rows) throw ShapeError("random_isometry: more columns than rows");
  return random_unitary(rows, rng).leftCols(cols);
}

Mat random_with_norm(Index rows, Index cols, double norm, Rng& rng) {
  Mat m = ginibre(rows, cols, rng);
  const double n = linalg::op_norm(m);
  return n > 0.0 ? Mat(m * (norm / n)) : m;
}

MatrixTuple random_tuple(Grid grid, Index level, double norm, Rng& rng) {
  return MatrixTuple::from_flat(grid, random_with_norm(grid.rows * level, grid.cols * level, norm, rng));
}

namespace {

NCPolynomial random_poly_impl(Grid grid, Shape shape, int min_degree, int max_degree, double density, Rng& rng,
                              const std::function<Mat()>& coeff) {
  NCPolynomial p(grid, shape);
  std::vector<Word> candidates;
  for (int k = std::max(0, min_degree); k <= max_degree; ++k) {
    for (auto& w : words_of_length(grid, k)) candidates.push_back(std::move(w));
  }
  if (candidates.empty()) return p;
  for (const auto& w : candidates) {
    if (uniform(rng) < density) p.add_term(w, coeff());
  }
  while (p.is_zero()) {
    const auto& w = candidates[static_cast<std::size_t>(uniform(rng) * candidates.size()) % candidates.size()];
    p.add_term(w, coeff());
  }
  return p;
}

}  // namespace

NCPolynomial random_poly(Grid grid, Shape shape, int min_degree, int max_degree, double density, Rng& rng) {
  return random_poly_impl(grid, shape, min_degree, max_degree, density, rng,
                          [&] { return ginibre(shape.rows, shape.cols, rng); });
}

NCPolynomial random_integer_poly(Grid grid, Shape shape, int min_degree, int max_degree, double density, int range,
                                 Rng& rng) {
  auto pick = [&] {
    return static_cast<double>(static_cast<int>(uniform(rng) * (2 * range + 1)) - range);
  };
  return random_poly_impl(grid, shape, min_degree, max_degree, density, rng, [&] {
    Mat m(shape.rows, shape.cols);
    for (Index i = 0; i < m.size(); ++i) m(i) = Complex(pick(), pick());
    return m;
  });
}

}  // namespace ncball
