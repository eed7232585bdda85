#pragma once

// Small reference objects shared by the suite, the command-line tool and
// the tests.

#include "ncball/balls.hpp"
#include "ncball/isometry.hpp"
#include "ncball/ncpoly.hpp"
#include "ncball/random.hpp"

namespace ncball::examples {

/// 2×3 integer coefficient of the evaluation example.
Mat evaluation_coefficient();
/// The two 2×2 points X_11, X_21 of the evaluation example.
MatrixTuple evaluation_point();
/// The polynomial A·x11·x21 on the 2×1 grid.
NCPolynomial evaluation_polynomial();
/// The 4×6 value it takes at evaluation_point().
Mat evaluation_value();

/// Two-variable pencil (4×3 coefficients) that is a distinguished isometry
/// but not a complete isometry.
LinearPencil distinguished_pencil();
/// The 2×2 point pair at which it shrinks norms: ‖[X; Y]‖ = √2, ‖L(X, Y)‖ = √(3/2).
MatrixTuple distinguished_shrink_point();

/// distinguished_pencil() ⊕ (a random two-variable pencil of norm ≤ 0.5 and
/// size extra×extra), rotated by Haar unitaries on both sides. Clings in
/// scalar directions.
LinearPencil rotated_clinging_pencil(Index extra, Rng& rng);

/// ψ: C^{2×2} → C, ψ(E_jl) = δ_jl (the trace); contractive block transpose
/// but ‖ψ(E_11 + E_22)‖ = 2.
LinearMatrixMap trace_map();

/// ψ(Y) = V diag(Y, φ(Y)) U* with Haar V, U and φ(Y) = Σ y_jl K_jl, Σ‖K_jl‖ = 0.9.
LinearMatrixMap random_complete_isometry(Grid grid, Index extra_rows, Index extra_cols, Rng& rng);

/// h(x) = V diag(x, c·x²) U* on the 1×1 grid with d' = d = 2 and random unitaries.
TruncatedSeries rotated_square_map(Complex c, Rng& rng, int degree = 3);

/// h(y) = W [y_1; p(y) y_2] with y = U x, W, U Haar unitaries and p a
/// scalar polynomial with Σ|coefficients| ≤ 0.9: a contraction-valued map
/// whose linear part is isometric exactly on one direction.
TruncatedSeries rotated_clinging_map(Rng& rng, int degree = 3);

}  // namespace ncball::examples
