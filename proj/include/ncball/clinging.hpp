#pragma once

// Distinguished isometries of the column ball: for a pencil
// L(x) = Σ A_j x_j on a g×1 grid,
//   Δ_L(X) = I_d ⊗ Σ X_j*X_j − L(X)*L(X) = x̂* (G ⊗ I) x̂,
// with Gram matrix G = I_{gd} − [A_i* A_j] and x̂ = [I_d ⊗ X_1; …; I_d ⊗ X_g].

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncball/balls.hpp"

namespace ncball {

struct GramMatrix {
  int g = 0;
  int d = 0;
  Mat g_mat;  // gd × gd, block (i, j) = B_{ij}

  Mat block(int i, int j) const { return g_mat.block(i * d, j * d, d, d); }
};

/// G = I − [A_i* A_j]; L must be on a g×1 grid.
GramMatrix gram_of_delta(const LinearPencil& l);

/// Δ_L(X) evaluated directly from the pencil.
Mat delta_eval(const LinearPencil& l, const MatrixTuple& x);

/// Σ B_{ij} ⊗ X_i* X_j assembled from the Gram matrix.
Mat gram_form_eval(const GramMatrix& g, const MatrixTuple& x);

struct PsdReport {
  bool psd = false;
  double min_eigenvalue = 0.0;
  std::optional<MatrixTuple> witness;  // point with Δ(X) not PSD
  double witness_value = 0.0;          // min eigenvalue of the form at the witness
};

/// G ⪰ 0 up to −1e-9·max(1, ‖G‖). When it fails, a witness X at level d is
/// built from a negative eigenvector η as X_i = e_1 η_i^T.
PsdReport delta_psd(const GramMatrix& g);

/// Scalar binding kernel N₀ = span{α ⊗ v ∈ ker G}.
struct BindingKernel {
  int g = 0;
  int d = 0;
  std::vector<Vec> alphas;  // α_i ∈ C^g, normalized to α_{i,1} = 1 when possible
  std::vector<Vec> vs;      // v_i ∈ C^d; v_1..v_t independent
  int t = 0;
  int m = 0;
  Mat gamma;                // m × t, v_{t+j} = Σ_i γ_{ji} v_i
  double kernel_residual = 0.0;  // max ‖G η_i‖
  bool exact_path = false;       // g = 2 pencil method
  bool heuristic = false;        // sampled directions only

  Vec eta(int i) const;
  int dim() const { return t + m; }
};

struct ScalarClinging {
  bool clings = false;
  BindingKernel kernel;
  std::optional<Vec> failing_direction;  // α with ker T(α) = 0
  Index generic_kernel_dim = 0;
  std::vector<Vec> special_directions;   // directions with a larger kernel
};

/// T(α) = [Σ_j α_j G_{ij}]_i, so that G(α ⊗ v) = T(α) v.
Mat direction_operator(const GramMatrix& g, const Vec& alpha);

/// Decides scalar clinging and assembles N₀. For g = 2 uses the pencil
/// K_1 + λK_2 (generic rank plus its rank-dropping values); for g ≥ 3 uses
/// 2048 quasi-random projective directions plus local refinement, flagged
/// heuristic. Requires G Hermitian and PSD for the kernel to mean clinging.
ScalarClinging clinging_scalar(const GramMatrix& g, std::uint64_t seed = 0);

/// Same decision from sampled directions only (any g).
ScalarClinging clinging_scalar_sampled(const GramMatrix& g, int directions = 2048, std::uint64_t seed = 0,
                                       bool refine = true);

struct OrthotropicReport {
  bool pass = false;
  bool normalized = false;    // top singular value of A_1 equals 1
  double top_singular = 0.0;
  Index multiplicity = 0;
  LinearPencil normalized_pencil;
  std::vector<double> offdiag_norms;  // ‖(A_j)_{12}‖ for j ≥ 2
  std::string message;
};

OrthotropicReport orthotropic_check(const LinearPencil& l, double tol = 1e-9);

struct BindSystemResult {
  bool solvable = false;     // a solution with v = Σ v_i ⊗ r_i … ≠ 0 exists
  Index nullity = 0;
  Index equations = 0;
  Index unknowns = 0;
  std::vector<Vec> r;        // one solution r_1..r_{t+m}
  bool reduced_form_checked = false;
  double reduced_form_residual = 0.0;
};

/// The homogeneous system (Z_k α_{i,1} − α_{i,k}) r_i + Σ_j γ_{ji}(Z_k α_{j,1} − α_{j,k}) r_j = 0
/// for i ≤ t, k = 2..g (with α_{i,1} = 1 this is the familiar form).
/// `z` holds Z_2..Z_g.
BindSystemResult bind_system_solve(const BindingKernel& kernel, const std::vector<Mat>& z);

/// t(g − 2) < m.
bool theorem_9_4_applies(const BindingKernel& kernel);

enum class ClingVerdict { proved_by_9_4, verified_by_sampling, refuted, unknown };

std::string to_string(ClingVerdict v);

struct ClingingReport {
  bool psd = false;
  double gram_min_eigenvalue = 0.0;
  bool clings_scalar = false;
  bool applies_9_4 = false;
  int t = 0;
  int m = 0;
  ClingVerdict verdict = ClingVerdict::unknown;
  std::vector<double> min_singular_samples;  // smallest eigenvalue of Δ_L(X) per sample
  double max_sample = 0.0;
  std::optional<MatrixTuple> refuting_point;
  bool heuristic_kernel = false;
};

/// Full analysis: Gram PSD, scalar clinging, the t(g − 2) < m count and sampled matrix
/// clinging over levels 1..levels.
ClingingReport matrix_clinging_sample(const LinearPencil& l, int levels, int samples, std::uint64_t seed);

struct SearchCandidate {
  int index = 0;             // construction index within the run
  LinearPencil pencil;
  MatrixTuple point;
  double margin = 0.0;       // λ_min(Δ_L(X)) / ‖X‖²
  int t = 0;
  int m = 0;
};

struct SearchReport {
  int constructed = 0;
  int passed_filters = 0;
  int theorem_covered = 0;   // filtered pencils already settled by t(g−2) < m
  std::vector<SearchCandidate> candidates;
};

/// Seeded search over 3-variable pencils that are orthotropic, Δ-PSD and
/// scalar clinging, for points where Δ_L(X) is positive definite.
SearchReport three_var_search(int budget, std::uint64_t seed, int max_d = 3, int max_level = 3,
                              double margin = 1e-6);

/// Filters used by the search, exposed for testing: true when L passes all three.
bool search_filters(const LinearPencil& l, std::uint64_t seed, BindingKernel* kernel = nullptr);

}  // namespace ncball
