#pragma once

// Dense complex linear algebra helpers shared by every module: norms, rank
// decisions, Hermitian hygiene, square roots and unitary completion.

#include "ncball/types.hpp"

namespace ncball::linalg {

/// Default relative threshold for SVD rank decisions.
inline constexpr double kRankTol = 1e-10;

/// Largest singular value (operator 2-norm). Zero for empty matrices.
double op_norm(const Mat& m);

/// Singular values in decreasing order.
RealVec singular_values(const Mat& m);

/// A ⊗ B (Kronecker product, A's indices outer).
Mat kron(const Mat& a, const Mat& b);

/// Given M = A⊗B with A of size (ar×ac) and B of size (br×bc), returns B⊗A.
/// The map is a fixed row/column permutation, so it is also correct for sums
/// of such products. This is the canonical shuffle between the
/// coefficient-left and coefficient-right amplification conventions.
Mat swap_kron_factors(const Mat& m, Index ar, Index ac, Index br, Index bc);

/// (M + M*)/2 and the asymmetry norm ‖M − M*‖ / 2.
struct HermitianPart {
  Mat h;
  double asymmetry = 0.0;
};
HermitianPart hermitian_part(const Mat& m);

/// Throws PreconditionError when ‖M − M*‖/2 > tol · max(1, ‖M‖).
Mat checked_hermitian(const Mat& m, double tol = 1e-10);

/// Eigenvalues (ascending) of the Hermitian part of M; asymmetry is checked.
RealVec hermitian_eigenvalues(const Mat& m);

/// Smallest eigenvalue together with a unit eigenvector.
struct ExtremeEigen {
  double value = 0.0;
  Vec vector;
};
ExtremeEigen min_eigen(const Mat& m);

/// Hermitian PSD square root; eigenvalues below `clamp` (in absolute value
/// when negative) are set to zero before taking roots.
Mat psd_sqrt(const Mat& m, double clamp = 1e-12);

/// Number of singular values above rel_tol · σ_max (absolute floor abs_floor).
Index numerical_rank(const Mat& m, double rel_tol = kRankTol, double abs_floor = 1e-300);

/// Orthonormal basis (columns) of ker M using the same rank decision.
Mat null_space(const Mat& m, double rel_tol = kRankTol, double abs_floor = 1e-300);

/// Orthonormal basis of range M.
Mat range_basis(const Mat& m, double rel_tol = kRankTol);

/// Extends an n×k isometry Q to an n×n unitary whose first k columns are Q.
/// Modified Gram–Schmidt against the standard basis with one pass of
/// reorthogonalization.
Mat complete_to_unitary(const Mat& q);

/// Unitary polar factor U V* of M = U Σ V*. For rectangular M returns the
/// partial isometry with the same shape.
Mat polar_factor(const Mat& m);

/// ‖Q*Q − I‖ for a matrix with orthonormal columns.
double isometry_defect(const Mat& q);

/// Condition number estimate (σ_max/σ_min) of a square matrix.
double condition_number(const Mat& m);

}  // namespace ncball::linalg
