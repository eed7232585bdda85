#pragma once

// Matrix left Nullstellensatz at desk scale: test "P(X)v = 0 ⇒ Q(X)v = 0"
// and search for a cofactor G with Q = G P.
//
// A matrix of scalar NC polynomials in g variables is stored as one
// NCPolynomial on the g×1 grid whose coefficients are rows×cols matrices.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncball/ncpoly.hpp"

namespace ncball {

using PolyMatrix = NCPolynomial;

/// Packs a rows × cols array of scalar polynomials (all on the g×1 grid).
PolyMatrix pack_poly_matrix(const std::vector<std::vector<NCPolynomial>>& entries, int variables);

/// Inverse of pack_poly_matrix.
std::vector<std::vector<NCPolynomial>> unpack_poly_matrix(const PolyMatrix& m);

enum class SolveMode { exact, floating };

std::string to_string(SolveMode m);
SolveMode solve_mode_from_string(const std::string& s);

struct KernelCounterexample {
  MatrixTuple point;
  Vec vector;          // unit vector with P(X)v = 0
  double q_norm = 0.0; // ‖Q(X)v‖
};

struct QuotientModel {
  int degree = 0;               // N
  int generator_degree = 0;     // N' at which the dimension stabilized
  bool stabilized = false;
  Index dim = 0;                // dim W_N
  Index ambient_dim = 0;        // dim of row polynomials of degree ≤ N
  Mat basis;                    // orthonormal complement of the truncated submodule (coordinates)
  Mat submodule;                // orthonormal basis of the truncated submodule
  std::vector<Mat> y;           // left multiplication by x_j on W_N
  std::vector<Vec> v;           // classes of the unit rows e_c
  double well_defined_defect = 0.0;
  std::vector<Index> history;   // submodule dimension per N'
};

/// Coordinates of row polynomials of degree ≤ N: index c·#words + word index.
Vec row_coordinates(const NCPolynomial& row, int degree);

/// W_N = (row polynomials of degree ≤ N) / (span{w·P_s : |w| + deg P_s ≤ N'} ∩ degree ≤ N),
/// escalating N' from N until the dimension is unchanged for two steps.
QuotientModel quotient_model(const PolyMatrix& p, int n, int max_escalation = 4);

struct KernelHypothesisReport {
  double sampling_max_residual = 0.0;  // max ‖Q(X)K‖ over samples
  int samples_with_kernel = 0;
  std::optional<KernelCounterexample> counterexample;
  double model_residual = 0.0;         // max_j ‖Q_j(Y)v‖
  double membership_residual = 0.0;    // max_j distance of Q_j to the submodule
  bool model_stabilized = false;
  bool holds = false;
  std::string verdict;                 // "holds", "fails" or "inconclusive"
};

/// Sampling (random points with random ranks so that kernels occur) and the
/// canonical quotient model at degree N = max(deg P, deg Q) + 1.
KernelHypothesisReport kernel_hypothesis_check(const PolyMatrix& p, const PolyMatrix& q, int levels, int samples,
                                               std::uint64_t seed);

struct CofactorResult {
  bool success = false;
  PolyMatrix g;
  int degree_used = -1;
  double residual = 0.0;           // max coefficient of Q − GP (0 in exact mode on success)
  bool exact_verified = false;     // Q − GP = 0 in rational arithmetic
  SolveMode mode = SolveMode::exact;
  int max_degree = 0;
  double min_residual = 0.0;       // best least-squares residual reached on failure
  std::optional<KernelCounterexample> counterexample;
  bool budget_exhausted = false;
  std::string message;
};

/// deg Q + deg P + 2.
int default_cofactor_degree(const PolyMatrix& p, const PolyMatrix& q);

/// Searches G with deg G = 0, 1, …, max_degree. Failures carry either a
/// sampled counterexample to the kernel hypothesis or the budget flag.
CofactorResult cofactor_solve(const PolyMatrix& p, const PolyMatrix& q, int max_degree,
                              SolveMode mode = SolveMode::exact, std::uint64_t seed = 0);

}  // namespace ncball
