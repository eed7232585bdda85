#pragma once

// Linear-fractional automorphisms of the matrix ball B_{d'×d}:
//   F_v(u) = v − (I − vv*)^{1/2} u (I − v*u)^{-1} (I − v*v)^{1/2}.
// At level n, v and both defect roots are lifted as (·) ⊗ I_n.

#include "ncball/ncpoly.hpp"

namespace ncball {

class MoebiusParams {
 public:
  /// Requires ‖v‖ < 1.
  explicit MoebiusParams(const Mat& v);

  const Mat& v() const { return v_; }
  /// (I − vv*)^{1/2}, d'×d'.
  const Mat& left_root() const { return left_root_; }
  /// (I − v*v)^{1/2}, d×d.
  const Mat& right_root() const { return right_root_; }

 private:
  Mat v_;
  Mat left_root_;
  Mat right_root_;
};

struct MoebiusValue {
  Mat value;
  double condition = 1.0;  // condition number of I − v*U
  bool ill_conditioned = false;  // condition > 1e8
};

/// F_v(U) for U of size d'n × dn.
MoebiusValue moebius_apply(const MoebiusParams& params, const Mat& u);

/// F_V(U) for a general point V of the same size as U (‖V‖ < 1).
MoebiusValue moebius_apply_point(const Mat& v, const Mat& u);

struct InvolutionReport {
  double residual = 0.0;  // ‖F_v(F_v(U)) − U‖
  bool pass = false;      // residual ≤ 1e-9
};

InvolutionReport verify_involution(const MoebiusParams& params, const Mat& u);

/// Number of singular values of U equal to 1 within tol.
Index isometric_rank(const Mat& u, double tol = 1e-8);

struct RankReport {
  Index before = 0;
  Index after = 0;
  bool pass = false;
};

RankReport verify_rank_preservation(const MoebiusParams& params, const Mat& u, double tol = 1e-8);

/// Series of F_v∘u truncated at degree D, with (I − v*u)^{-1} expanded as a
/// Neumann series around the constant term of u. Requires ‖v*u(0)‖ < 1.
TruncatedSeries moebius_compose_series(const MoebiusParams& params, const TruncatedSeries& u, int degree);

}  // namespace ncball
