#pragma once

// NC ball maps given as truncated series: linear parts, the canonical form
// h(x) = V [x 0; 0 h̃(x)] U*, its Möbius and pencil variants, Schwarz-type
// sampling suites and the decomposition of semi-distinguished maps.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncball/isometry.hpp"
#include "ncball/moebius.hpp"

namespace ncball {

/// Degree-1 part of h as a linear map; requires h(0) = 0 to 1e-12.
LinearMatrixMap linear_part(const TruncatedSeries& h);

/// L∘f for a pencil L whose grid equals f's coefficient shape. The pencil is
/// applied coefficient-wise, so the degree of f is kept.
TruncatedSeries compose_pencil(const LinearPencil& l, const TruncatedSeries& f);

/// ‖top part at X‖ · ρ/(1 − ρ) with ρ = ‖X‖: the neglected-tail heuristic.
double tail_heuristic(const TruncatedSeries& f, const MatrixTuple& x);

struct BlockViolation {
  int alpha = 0;
  std::string block;  // "b1", "b2" or "b3"
  double norm = 0.0;
};

struct BallMapAnalysis {
  bool accepted = false;
  std::string stage;    // failing stage on rejection
  std::string message;
  TruncatedSeries input;
  LinearMatrixMap linear_part;
  std::optional<CompleteIsometryCertificate> cert;
  std::optional<TruncatedSeries> tilde_h;  // absent when its shape is empty
  Shape tilde_shape{};
  std::optional<BlockViolation> violation;
  double max_offdiag = 0.0;             // largest b1/b2/b3 coefficient for α ≥ 2
  double reconstruction_residual = 0.0; // h vs V diag(x, h̃) U*, coefficient-wise
  bool fock_checked = false;
  bool fock_consistent = true;
  // Möbius path
  bool via_moebius = false;
  Mat basepoint;
  std::optional<TruncatedSeries> phi;
  double round_trip_residual = 0.0;     // f vs F_{f(0)}∘φ
};

/// Canonical form for h(0) = 0: certify the linear part, rotate by V*, U,
/// check that the b1, b2, b3 blocks of every part of degree ≥ 2 vanish and
/// collect h̃ from the b4 blocks. The b2 and b3 polynomials are also run
/// through the Fock model test when its level stays small.
BallMapAnalysis canonical_form_zero(const TruncatedSeries& h, double tol = 1e-8, std::uint64_t seed = 0);

/// Möbius-normalized form for ‖f(0)‖ < 1: φ = F_{f(0)}∘f, canonical form of
/// φ, and the round trip f = F_{f(0)}∘φ.
BallMapAnalysis canonical_form_general(const TruncatedSeries& f, double tol = 1e-8, std::uint64_t seed = 0);

/// h = L∘f, then the zero or general path depending on h(0).
BallMapAnalysis pencil_ball_map_form(const LinearPencil& l, const TruncatedSeries& f, double tol = 1e-8,
                                     std::uint64_t seed = 0);

struct SuiteOptions {
  int levels = 3;
  int samples = 200;
  std::uint64_t seed = 0;
  bool truncated = false;  // widen tolerances by the tail heuristic
  bool stop_on_failure = false;
};

struct SampleFailure {
  int sample = 0;
  MatrixTuple point;
  double value = 0.0;
};

struct SchwarzReport {
  bool pass = true;
  int samples = 0;
  double min_eigenvalue = 0.0;  // over all samples
  double max_norm = 0.0;        // max ‖f(X)‖
  double max_tail = 0.0;
  std::optional<SampleFailure> first_failure;
};

/// I_d ⊗ X*X − f(X)*f(X) ⪰ 0 and ‖f(X)‖ ≤ 1 on seeded column contractions
/// with ‖X‖ ≤ 0.9. f must live on a g×1 grid with f(0) = 0.
SchwarzReport schwarz_suite(const TruncatedSeries& f, const SuiteOptions& opts);

struct ScottReport {
  int samples = 0;
  int hypothesis_held = 0;
  bool hypothesis_everywhere = false;  // ‖Σ H_j(X)(I_d ⊗ X_j)‖ ≤ 1 on every sample
  double max_hypothesis = 0.0;
  double min_conclusion = 0.0;   // min eigenvalue of I − H(X)H(X)* over all samples
  int implication_violations = 0;
  std::optional<SampleFailure> first_violation;
};

/// For H = [H_1 … H_g'] (each on a g'×1 grid with shape d'×d). The
/// hypothesis ‖Σ H_j(X)(I_d ⊗ X_j)‖ ≤ 1 is a condition on the whole ball, so
/// the conclusion I − H(X)H(X)* ⪰ 0 is asserted only when it held on every
/// sample; violations are counted in that case alone.
ScottReport scott_suite(const std::vector<TruncatedSeries>& h, const SuiteOptions& opts);

struct BidiskDecomposition {
  Mat m;                                  // d' × g'd, [A_1 … A_g']
  Mat s;                                  // orthonormal basis of ker(I − M*M)
  Mat s_perp;
  std::vector<NCPolynomial> p_parts;      // P_α for α = 2..D, shape d' × g'd
  std::vector<double> factor_residuals;   // per α
  int failed_alpha = 0;                   // first α whose factorization residual exceeds tol
  double isometry_defect = 0.0;           // ‖(M S)*(M S) − I‖
  double perp_contraction = 0.0;          // ‖M Π_{S⊥}‖
  double orth_linear = 0.0;               // ‖(M S)* M S⊥‖
  double orth_parts = 0.0;                // max ‖(M S ⊗ I)* P_α(X) (S⊥ ⊗ I)‖ over samples
  double max_perp_norm = 0.0;             // max ‖(M ⊗ I + P(X))(Π_{S⊥} ⊗ I)‖
  double max_tail = 0.0;
  bool pass = false;
};

/// Semi-distinguished decomposition of h on a g'×1 grid with h(0) = 0.
BidiskDecomposition bidisk_decompose(const TruncatedSeries& h, double tol = 1e-10, int levels = 3,
                                     int samples = 20, std::uint64_t seed = 0);

/// Reassembles h(x) = (M + Σ P_α(x) Π_{S⊥}) x̂ from a decomposition.
TruncatedSeries bidisk_assemble(const BidiskDecomposition& dec, Grid grid, Shape shape);

struct MaxPrincipleReport {
  bool pass = true;
  int samples = 0;
  double max_interior = 0.0;
  double max_boundary = 0.0;
  double worst_gap = 0.0;  // max over samples of ‖f(X)‖ − max_z ‖f(F_X(zU))‖
};

/// Compares ‖f(X)‖ at interior X of the level-N matrix ball with the values
/// on the circle F_X(zU), U isometric on a subspace of dimension ≥ Nk.
MaxPrincipleReport maximum_principle_sample(const TruncatedSeries& f, int n, int k, int samples,
                                            std::uint64_t seed, int circle_points = 128);

/// A level-N point of the g'×g ball that is isometric on an Nk-dimensional
/// subspace and strictly contractive elsewhere.
Mat random_partial_isometry_point(Index rows, Index cols, Index rank, std::uint64_t seed);

}  // namespace ncball
