#include "ncball/fock.hpp"

#include <cmath>
#include <map>

#include "ncball/linalg.hpp"

namespace ncball {

using Triplet = Eigen::Triplet<long long, long long>;

TruncatedFock::TruncatedFock(int letters, int max_length) : letters_(letters), max_length_(max_length) {
  if (letters < 1) throw PreconditionError("Fock space needs at least one letter");
  if (max_length < 0) throw PreconditionError("Fock space truncation must be non-negative");
  offsets_.push_back(0);
  Index count = 1;
  for (int k = 0; k <= max_length; ++k) {
    offsets_.push_back(offsets_.back() + count);
    count *= letters;
  }
}

Index TruncatedFock::index_of(const std::vector<int>& word) const {
  if (static_cast<int>(word.size()) > max_length_) throw ShapeError("word longer than the truncation");
  Index pos = 0;
  for (int a : word) pos = pos * letters_ + a;
  return offsets_[word.size()] + pos;
}

std::vector<int> TruncatedFock::word_at(Index index) const {
  int k = 0;
  while (offsets_[k + 1] <= index) ++k;
  Index pos = index - offsets_[k];
  std::vector<int> w(k);
  for (int i = k - 1; i >= 0; --i) {
    w[i] = static_cast<int>(pos % letters_);
    pos /= letters_;
  }
  return w;
}

std::vector<SparseInt> build_shifts(const TruncatedFock& fock) {
  std::vector<SparseInt> out;
  const Index dim = fock.dim();
  for (int j = 0; j < fock.letters(); ++j) {
    std::vector<Triplet> t;
    for (Index col = 0; col < fock.offset(fock.max_length()); ++col) {
      std::vector<int> w = fock.word_at(col);
      w.insert(w.begin(), j);
      t.emplace_back(fock.index_of(w), col, 1);
    }
    SparseInt s(dim, dim);
    s.setFromTriplets(t.begin(), t.end());
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

SparseInt diagonal(Index dim, Index from, Index to) {
  std::vector<Triplet> t;
  for (Index i = from; i < to; ++i) t.emplace_back(i, i, 1);
  SparseInt m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Index mismatches(const SparseInt& a, const SparseInt& b) {
  SparseInt diff = a - b;
  Index count = 0;
  for (Index k = 0; k < diff.outerSize(); ++k)
    for (SparseInt::InnerIterator it(diff, k); it; ++it)
      if (it.value() != 0) ++count;
  return count;
}

bool is_zero(const SparseInt& a) {
  for (Index k = 0; k < a.outerSize(); ++k)
    for (SparseInt::InnerIterator it(a, k); it; ++it)
      if (it.value() != 0) return false;
  return true;
}

}  // namespace

SparseInt projection_nonempty(const TruncatedFock& fock) { return diagonal(fock.dim(), 1, fock.dim()); }

SparseInt projection_short(const TruncatedFock& fock) {
  return diagonal(fock.dim(), 0, fock.offset(fock.max_length()));
}

SparseInt sparse_identity(Index n) { return diagonal(n, 0, n); }

SparseInt sparse_kron(const SparseInt& a, const SparseInt& b) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (Index ka = 0; ka < a.outerSize(); ++ka)
    for (SparseInt::InnerIterator ia(a, ka); ia; ++ia)
      for (Index kb = 0; kb < b.outerSize(); ++kb)
        for (SparseInt::InnerIterator ib(b, kb); ib; ++ib)
          t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(), ia.value() * ib.value());
  SparseInt out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

ShiftIdentityReport check_shift_identities(const TruncatedFock& fock) {
  ShiftIdentityReport r;
  const auto s = build_shifts(fock);
  const SparseInt q = projection_short(fock);
  const SparseInt zero(fock.dim(), fock.dim());
  r.isometry_relations = true;
  SparseInt range_sum(fock.dim(), fock.dim());
  for (int j = 0; j < fock.letters(); ++j) {
    for (int l = 0; l < fock.letters(); ++l) {
      SparseInt prod = SparseInt(s[j].transpose()) * s[l];
      if (mismatches(prod, j == l ? q : zero) != 0) r.isometry_relations = false;
    }
    range_sum = range_sum + SparseInt(s[j] * SparseInt(s[j].transpose()));
  }
  const SparseInt defect = sparse_identity(fock.dim()) - range_sum;
  r.defect_relation = mismatches(defect, diagonal(fock.dim(), 0, 1)) == 0;
  return r;
}

SparseInt BigX::flatten() const {
  std::vector<Triplet> t;
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) {
      const SparseInt& e = entries[r * grid.cols + c];
      for (Index k = 0; k < e.outerSize(); ++k)
        for (SparseInt::InnerIterator it(e, k); it; ++it)
          t.emplace_back(r * level + it.row(), c * level + it.col(), it.value());
    }
  SparseInt out(grid.rows * level, grid.cols * level);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

MatrixTuple BigX::to_tuple() const {
  std::vector<Mat> dense;
  for (const auto& e : entries) dense.push_back(Mat(e.cast<double>().toDense().cast<Complex>()));
  return MatrixTuple(grid, std::move(dense));
}

BigX build_bigX(int gprime, int g, int n) {
  if (n < 1) throw PreconditionError("build_bigX: n must be at least 1");
  TruncatedFock left(gprime, n);
  TruncatedFock right(g, n);
  const auto sl = build_shifts(left);
  const auto sr = build_shifts(right);
  BigX x;
  x.grid = {gprime, g};
  x.n = n;
  x.level = left.dim() * right.dim();
  for (int j = 0; j < gprime; ++j)
    for (int l = 0; l < g; ++l) x.entries.push_back(sparse_kron(SparseInt(sl[j].transpose()), sr[l]));
  return x;
}

BigXIdentityReport check_bigX_identities(const BigX& x) {
  BigXIdentityReport r;
  r.level = x.level;
  TruncatedFock left(x.grid.rows, x.n);
  TruncatedFock right(x.grid.cols, x.n);
  const SparseInt flat = x.flatten();
  const SparseInt flat_t = flat.transpose();

  const SparseInt expected_star =
      sparse_kron(sparse_identity(x.grid.cols), sparse_kron(projection_nonempty(left), projection_short(right)));
  const SparseInt expected_prod =
      sparse_kron(sparse_identity(x.grid.rows), sparse_kron(projection_short(left), projection_nonempty(right)));
  r.star_product_mismatches = mismatches(SparseInt(flat_t * flat), expected_star);
  r.product_star_mismatches = mismatches(SparseInt(flat * flat_t), expected_prod);
  r.star_product = r.star_product_mismatches == 0;
  r.product_star = r.product_star_mismatches == 0;

  // Entries are non-negative integers, so T^k = 0 for T = Σ X_{jl} exactly
  // when every word of length k vanishes.
  SparseInt total(x.level, x.level);
  for (const auto& e : x.entries) total = total + e;
  SparseInt power = total;
  for (int k = 1; k < x.n; ++k) power = SparseInt(power * total);
  const bool order_n_nonzero = !is_zero(power);
  power = SparseInt(power * total);
  r.nilpotent = order_n_nonzero && is_zero(power);
  return r;
}

namespace {

// p(𝕏) with word values formed as exact sparse products; the entries of 𝕏
// are 0/1 matrices with at most one nonzero per row, so this avoids dense
// products at levels in the hundreds.
Mat eval_on_model(const NCPolynomial& p, const BigX& x) {
  const Index n = x.level;
  Mat out = Mat::Zero(p.shape().rows * n, p.shape().cols * n);
  std::map<Word, SparseInt, GradedLex> cache;
  cache.emplace(Word{}, sparse_identity(n));
  auto value_of = [&](const Word& w, auto&& self) -> const SparseInt& {
    auto it = cache.find(w);
    if (it != cache.end()) return it->second;
    const Word prefix(w.begin(), w.end() - 1);
    const Letter& l = w.back();
    const SparseInt& e = x.entries[static_cast<std::size_t>(l.row * x.grid.cols + l.col)];
    SparseInt v = self(prefix, self) * e;
    return cache.emplace(w, std::move(v)).first->second;
  };
  for (const auto& [w, a] : p.terms()) {
    const SparseInt& v = value_of(w, value_of);
    for (Index k = 0; k < v.outerSize(); ++k)
      for (SparseInt::InnerIterator it(v, k); it; ++it)
        for (Index r = 0; r < a.rows(); ++r)
          for (Index c = 0; c < a.cols(); ++c)
            out(r * n + it.row(), c * n + it.col()) += a(r, c) * static_cast<double>(it.value());
  }
  return out;
}

Mat to_dense(const SparseInt& m) { return m.cast<double>().toDense().cast<Complex>(); }

}  // namespace

UniquePolyVerdict unique_s_polynomial_test(const NCPolynomial& p, int max_n, double tol) {
  if (p.has_star()) throw PreconditionError("unique_s_polynomial_test: polynomial has starred letters");
  if (linalg::op_norm(p.constant_term()) > 1e-12) throw PreconditionError("unique_s_polynomial_test: p(0) ≠ 0");
  if (p.degree() > max_n) throw PreconditionError("unique_s_polynomial_test: degree exceeds N");
  const bool part1 = p.shape().cols == p.grid().cols;
  const bool part2 = p.shape().rows == p.grid().rows;
  if (!part1 && !part2) {
    throw ShapeError("unique_s_polynomial_test: needs d = g or d' = g' to compare with the model");
  }
  UniquePolyVerdict v;
  for (int n = 1; n <= max_n; ++n) {
    const BigX big = build_bigX(p.grid().rows, p.grid().cols, n);
    const SparseInt flat = big.flatten();
    const SparseInt flat_t = flat.transpose();
    const Mat px = eval_on_model(p, big);
    const double scale = std::max(1.0, std::pow(linalg::op_norm(px), 2));
    for (int part = 1; part <= 2; ++part) {
      if ((part == 1 && !part1) || (part == 2 && !part2)) continue;
      Mat m;
      if (part == 1) {
        m = Mat::Identity(flat.cols(), flat.cols()) - to_dense(SparseInt(flat_t * flat)) - px.adjoint() * px;
      } else {
        m = Mat::Identity(flat.rows(), flat.rows()) - to_dense(SparseInt(flat * flat_t)) - px * px.adjoint();
      }
      const auto e = linalg::min_eigen(m);
      v.min_eigenvalues.push_back(e.value);
      if (e.value < -tol * scale) {
        v.consistent_with_zero = false;
        if (!v.witness || e.value < v.witness->min_eigenvalue) v.witness = UniqueWitness{n, part, e.value, e.vector};
      }
    }
  }
  return v;
}

UniqueSeriesVerdict unique_s_series_test(const TruncatedSeries& h, int max_n, double tol) {
  UniqueSeriesVerdict v;
  for (int n = 1; n <= max_n; ++n) {
    const MatrixTuple x = build_bigX(h.grid().rows, h.grid().cols, n).to_tuple();
    const double norm = linalg::op_norm(eval_nilpotent(h, x, n + 1));
    v.norms.push_back(norm);
    if (norm > tol && v.first_nonzero == 0) v.first_nonzero = n;
  }
  v.all_zero = v.first_nonzero == 0;
  return v;
}

DilationReport truncated_dilation(const MatrixTuple& x, int m) {
  if (x.grid().cols != 1) throw ShapeError("truncated_dilation: expects a column tuple");
  if (m < 0) throw PreconditionError("truncated_dilation: cutoff must be non-negative");
  const Index n = x.level();
  const int letters = x.grid().rows;
  Mat gram = Mat::Zero(n, n);
  for (const auto& e : x.entries()) gram += e.adjoint() * e;
  const Mat defect = Mat::Identity(n, n) - gram;
  if (n > 0 && linalg::min_eigen(defect).value <= 1e-12) {
    throw PreconditionError("truncated_dilation: X is not a strict column contraction");
  }
  const Mat delta = linalg::psd_sqrt(defect);

  TruncatedFock fock(letters, m);
  const Index dim = fock.dim();
  // reversed[i] = w̃(X) for the i-th word; for w = x_j w', w̃(X) = w̃'(X) X_j.
  std::vector<Mat> reversed(dim);
  reversed[0] = Mat::Identity(n, n);
  for (Index i = 1; i < dim; ++i) {
    std::vector<int> w = fock.word_at(i);
    const int j = w.front();
    w.erase(w.begin());
    reversed[i] = reversed[fock.index_of(w)] * x.at(j, 0);
  }

  DilationReport r;
  r.fock_dim = dim;
  r.v = Mat::Zero(n * dim, n);
  // Row (k, word) = k * dim + word.
  for (Index i = 0; i < dim; ++i) {
    const Mat block = delta * reversed[i];
    for (Index k = 0; k < n; ++k) r.v.row(k * dim + i) = block.row(k);
  }
  r.isometry_defect = linalg::op_norm(r.v.adjoint() * r.v - Mat::Identity(n, n));

  const auto shifts = build_shifts(fock);
  for (int j = 0; j < letters; ++j) {
    const Mat vx = r.v * x.at(j, 0);
    // (I ⊗ S_j*) V: the coefficient at word w is the coefficient of V at S_j w.
    double worst = 0.0;
    for (Index col = 0; col < fock.offset(m); ++col) {
      for (SparseInt::InnerIterator it(shifts[j], col); it; ++it) {
        for (Index k = 0; k < n; ++k) {
          const double diff = (vx.row(k * dim + col) - r.v.row(k * dim + it.row())).norm();
          worst = std::max(worst, diff);
        }
      }
    }
    r.intertwining_residual = std::max(r.intertwining_residual, worst);
  }
  return r;
}

}  // namespace ncball
