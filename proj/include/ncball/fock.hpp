#pragma once

// Truncated Fock spaces F_g(n), their shifts, the compressed tensor model
// 𝕏_n = [S_j* ⊗ S_l] and the uniqueness tests built on it.
//
// Truncation convention: S_j w = x_j w for |w| < n and S_j w = 0 for
// |w| = n. Under it the following hold exactly on F_g(n):
//   S_j* S_l = δ_{jl} Q,   I − Σ S_j S_j* = P_0,
// with Q the projection onto words of length < n and P_0 onto ∅.

#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "ncball/ncpoly.hpp"

namespace ncball {

using SparseInt = Eigen::SparseMatrix<long long, Eigen::ColMajor, long long>;

/// Words of length ≤ n in `letters` letters, graded-lex ordered.
class TruncatedFock {
 public:
  TruncatedFock(int letters, int max_length);

  int letters() const { return letters_; }
  int max_length() const { return max_length_; }
  Index dim() const { return offsets_.back(); }
  /// Index of the first word of the given length.
  Index offset(int length) const { return offsets_[length]; }
  /// Position of a word given as 0-based letter indices.
  Index index_of(const std::vector<int>& word) const;
  std::vector<int> word_at(Index index) const;

 private:
  int letters_;
  int max_length_;
  std::vector<Index> offsets_;  // offsets_[k] = number of words of length < k
};

/// S_1, …, S_g as exact 0/1 matrices.
std::vector<SparseInt> build_shifts(const TruncatedFock& fock);

/// Diagonal projections used by the identities.
SparseInt projection_nonempty(const TruncatedFock& fock);  // complement of ∅
SparseInt projection_short(const TruncatedFock& fock);     // words of length < n
SparseInt sparse_kron(const SparseInt& a, const SparseInt& b);
SparseInt sparse_identity(Index n);

struct ShiftIdentityReport {
  bool isometry_relations = false;  // S_j* S_l = δ_{jl} Q
  bool defect_relation = false;     // I − Σ S_j S_j* = P_0
};

ShiftIdentityReport check_shift_identities(const TruncatedFock& fock);

/// 𝕏_n at level dim F_{g'}(n) · dim F_g(n), entry (j, l) = S_j* ⊗ S_l.
struct BigX {
  Grid grid;
  int n = 0;
  Index level = 0;
  std::vector<SparseInt> entries;  // row-major over (j, l)

  SparseInt flatten() const;
  /// Dense copy; only sensible for small levels.
  MatrixTuple to_tuple() const;
};

BigX build_bigX(int gprime, int g, int n);

struct BigXIdentityReport {
  Index level = 0;
  bool star_product = false;   // 𝕏*𝕏 = I_g ⊗ P_n ⊗ Q_n
  bool product_star = false;   // 𝕏𝕏* = I_{g'} ⊗ Q_n ⊗ P_n
  Index star_product_mismatches = 0;
  Index product_star_mismatches = 0;
  bool nilpotent = false;      // words of length n+1 vanish, some word of length n does not
  bool pass() const { return star_product && product_star && nilpotent; }
};

BigXIdentityReport check_bigX_identities(const BigX& x);

struct UniqueWitness {
  int n = 0;
  int part = 1;               // 1: I − 𝕏*𝕏 − p*p, 2: I − 𝕏𝕏* − pp*
  double min_eigenvalue = 0.0;
  Vec vector;
};

struct UniquePolyVerdict {
  bool consistent_with_zero = true;
  std::optional<UniqueWitness> witness;  // most negative violation found
  std::vector<double> min_eigenvalues;   // per tested (n, part), in order
};

/// For n ≤ N tests positivity of I − 𝕏_n*𝕏_n − p(𝕏_n)*p(𝕏_n) (needs d = g)
/// and I − 𝕏_n𝕏_n* − p(𝕏_n)p(𝕏_n)* (needs d' = g').
UniquePolyVerdict unique_s_polynomial_test(const NCPolynomial& p, int max_n, double tol = 1e-9);

struct UniqueSeriesVerdict {
  std::vector<double> norms;  // ‖h(𝕏_n)‖ for n = 1..N
  int first_nonzero = 0;      // 0 if all vanish
  bool all_zero = true;
};

/// Evaluates h exactly at each 𝕏_n (nilpotent of order n+1).
UniqueSeriesVerdict unique_s_series_test(const TruncatedSeries& h, int max_n, double tol = 1e-12);

struct DilationReport {
  Mat v;                          // (n · dim F_{g'}(m)) × n, rows ordered (k, word)
  Index fock_dim = 0;
  double isometry_defect = 0.0;   // ‖V*V − I‖
  double intertwining_residual = 0.0;  // max_j ‖V X_j − (I ⊗ S_j*) V‖ on words of length < m
};

/// Truncated isometric dilation of a strict column contraction (g'×1 grid):
/// V h = Σ_{|w|≤m} Δ w̃(X) h ⊗ w with Δ = (I − Σ X_j*X_j)^{1/2} and w̃ the
/// reversed word. V*V = I − Σ_{|w|=m+1} w(X)* w(X).
DilationReport truncated_dilation(const MatrixTuple& x, int m);

}  // namespace ncball
