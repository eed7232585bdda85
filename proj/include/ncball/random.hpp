#pragma once

// Seeded random generators for matrices, tuples and polynomials.

#include <cstdint>
#include <random>
#include <string_view>

#include "ncball/ncpoly.hpp"

namespace ncball {

using Rng = std::mt19937_64;

/// 64-bit FNV-1a of a name.
std::uint64_t stable_hash(std::string_view name);

/// seed XOR stable_hash(name).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view name);

/// Complex Ginibre matrix: real and imaginary parts i.i.d. N(0, 1/2).
Mat ginibre(Index rows, Index cols, Rng& rng);

/// Haar unitary (QR of a Ginibre matrix with phase correction).
Mat random_unitary(Index n, Rng& rng);

/// rows×cols matrix with orthonormal columns.
Mat random_isometry(Index rows, Index cols, Rng& rng);

/// Ginibre matrix rescaled to the given operator norm.
Mat random_with_norm(Index rows, Index cols, double norm, Rng& rng);

/// Tuple whose flattened block matrix has the given operator norm.
MatrixTuple random_tuple(Grid grid, Index level, double norm, Rng& rng);

/// Uniform real in [lo, hi).
double uniform(Rng& rng, double lo = 0.0, double hi = 1.0);

/// Random polynomial: each word of length in [min_degree, max_degree] gets a
/// Ginibre coefficient with probability `density`; at least one term is
/// always present when min_degree ≤ max_degree.
NCPolynomial random_poly(Grid grid, Shape shape, int min_degree, int max_degree, double density, Rng& rng);

/// Like random_poly but with small integer coefficients (real and imaginary
/// parts in [-range, range]), suitable for exact arithmetic.
NCPolynomial random_integer_poly(Grid grid, Shape shape, int min_degree, int max_degree, double density, int range,
                                 Rng& rng);

}  // namespace ncball
