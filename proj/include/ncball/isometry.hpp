#pragma once

// Linear maps ψ: C^{g'×g} → C^{d'×d}, ψ(E_{jl}) = A_{jl}: contractivity
// checks and certification of complete isometries in the block form
//   ψ(Y) = V [Y 0; 0 φ(Y)] U*.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncball/balls.hpp"

namespace ncball {

/// Same data as a pencil: the coefficient array A_{jl} = ψ(E_{jl}).
using LinearMatrixMap = LinearPencil;

/// ψ amplified to level n in the coefficient-right form Σ X_{jl} ⊗ A_{jl}.
/// It differs from pencil_eval (coefficient-left) by the fixed shuffle
/// permutation linalg::swap_kron_factors.
Mat amplify(const LinearMatrixMap& psi, const MatrixTuple& x);

/// ψ(Y) for a scalar point Y ∈ C^{g'×g}.
Mat apply_map(const LinearMatrixMap& psi, const Mat& y);

/// The g d' × g' d block matrix whose (l, j) block is A_{jl}.
Mat block_transpose(const LinearMatrixMap& psi);

struct BlockTransposeReport {
  double norm = 0.0;
  bool pass = false;  // norm ≤ 1 + 1e-10
};

BlockTransposeReport block_transpose_test(const LinearMatrixMap& psi);

struct ContractivityReport {
  double max_ratio = 0.0;     // max ‖ψ(X)‖ / ‖X‖ found
  Index argmax_level = 0;
  MatrixTuple argmax;         // point attaining max_ratio
  bool plausibly_cc = false;  // max_ratio ≤ 1 + 1e-7
  int samples = 0;
};

/// Seeded sampling over levels 1..min(g, d)+1, each sample refined by
/// ascent (the polar factor of the gradient of Re u*ψ(X)v). A sampling
/// check, not a certificate.
ContractivityReport sample_complete_contractivity(const LinearMatrixMap& psi, int samples, std::uint64_t seed,
                                                  int ascent_steps = 40, std::optional<int> max_level = {});

struct CompleteIsometryCertificate {
  Mat u;                      // d×d unitary
  Mat v;                      // d'×d' unitary
  LinearMatrixMap phi;        // (d'−g')×(d−g) coefficients; empty shape allowed
  std::vector<Vec> f_vectors; // f_1..f_g ∈ C^d
  std::vector<Vec> h_vectors; // h_1..h_{g'} ∈ C^{d'}
  double fs_residual = 0.0;           // max deviation in the ⟨A f, A f⟩ table
  double h_independence = 0.0;        // max_j ‖A_{αj} f_j − h_α‖
  double off_diagonal = 0.0;          // max norm of the vanishing blocks
  double residual = 0.0;              // max_{jl} ‖A_{jl} − V diag(E_{jl}, φ_{jl}) U*‖
  int trials = 1;                     // maximizing vectors tried
};

struct IsometryCertification {
  bool accepted = false;
  bool inconclusive = false;
  std::string stage;          // failed stage on rejection
  std::string message;
  double residual = 0.0;      // measure of the failure on rejection
  std::optional<CompleteIsometryCertificate> certificate;
};

IsometryCertification certify_complete_isometry(const LinearMatrixMap& psi, double tol = 1e-8,
                                                std::uint64_t seed = 0);

struct CertificateCheck {
  double residual = 0.0;          // Σ_{jl} ‖A_{jl} − V diag(E_{jl}, φ_{jl}) U*‖
  double unitarity = 0.0;         // max(‖UU* − I‖, ‖VV* − I‖)
  double phi_max_ratio = 0.0;     // sampled cc ratio of φ (0 when φ is empty)
  bool phi_plausibly_cc = true;
};

CertificateCheck verify_certificate(const LinearMatrixMap& psi, const CompleteIsometryCertificate& cert,
                                    std::uint64_t seed = 0);

/// ψ(Y) = V diag(Y, φ(Y)) U* from its parts.
LinearMatrixMap assemble_map(const Mat& v, const LinearMatrixMap& phi, const Mat& u, Grid grid);

}  // namespace ncball
