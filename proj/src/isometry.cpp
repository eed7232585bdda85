#include "ncball/isometry.hpp"

#include <algorithm>
#include <cmath>

#include "ncball/linalg.hpp"
#include "ncball/random.hpp"

namespace ncball {

Mat amplify(const LinearMatrixMap& psi, const MatrixTuple& x) {
  if (!(psi.grid() == x.grid())) throw ShapeError("amplify: grid mismatch");
  const Index n = x.level();
  Mat out = Mat::Zero(n * psi.shape().rows, n * psi.shape().cols);
  for (int j = 0; j < psi.grid().rows; ++j)
    for (int l = 0; l < psi.grid().cols; ++l) out += linalg::kron(x.at(j, l), psi.at(j, l));
  return out;
}

Mat apply_map(const LinearMatrixMap& psi, const Mat& y) {
  if (y.rows() != psi.grid().rows || y.cols() != psi.grid().cols) throw ShapeError("apply_map: point shape");
  Mat out = Mat::Zero(psi.shape().rows, psi.shape().cols);
  for (int j = 0; j < psi.grid().rows; ++j)
    for (int l = 0; l < psi.grid().cols; ++l) out += y(j, l) * psi.at(j, l);
  return out;
}

Mat block_transpose(const LinearMatrixMap& psi) {
  const int gp = psi.grid().rows;
  const int g = psi.grid().cols;
  const int dp = psi.shape().rows;
  const int d = psi.shape().cols;
  Mat out = Mat::Zero(g * dp, gp * d);
  for (int j = 0; j < gp; ++j)
    for (int l = 0; l < g; ++l) out.block(l * dp, j * d, dp, d) = psi.at(j, l);
  return out;
}

BlockTransposeReport block_transpose_test(const LinearMatrixMap& psi) {
  BlockTransposeReport r;
  r.norm = linalg::op_norm(block_transpose(psi));
  r.pass = r.norm <= 1.0 + 1e-10;
  return r;
}

namespace {

// One ascent run from x (assumed ‖x‖ = 1); returns the best ratio and point.
std::pair<double, MatrixTuple> ascend(const LinearMatrixMap& psi, MatrixTuple x, int steps) {
  const Index n = x.level();
  const int dp = psi.shape().rows;
  const int d = psi.shape().cols;
  auto ratio_of = [&](const MatrixTuple& p) {
    const double nx = p.norm();
    return nx > 0.0 ? linalg::op_norm(amplify(psi, p)) / nx : 0.0;
  };
  double best = ratio_of(x);
  MatrixTuple best_x = x;
  for (int step = 0; step < steps; ++step) {
    Mat m = amplify(psi, x);
    if (m.size() == 0) break;
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec u = svd.matrixU().col(0);
    const Vec v = svd.matrixV().col(0);
    std::vector<Mat> grad;
    for (int j = 0; j < psi.grid().rows; ++j) {
      for (int l = 0; l < psi.grid().cols; ++l) {
        Mat gjl(n, n);
        for (Index a = 0; a < n; ++a)
          for (Index b = 0; b < n; ++b)
            gjl(a, b) = std::conj(u.segment(a * dp, dp).dot(psi.at(j, l) * v.segment(b * d, d)));
        grad.push_back(gjl);
      }
    }
    MatrixTuple g(psi.grid(), std::move(grad));
    const Mat flat = g.flatten();
    if (linalg::op_norm(flat) == 0.0) break;
    MatrixTuple next = MatrixTuple::from_flat(psi.grid(), linalg::polar_factor(flat));
    const double r = ratio_of(next);
    x = next;
    if (r > best + 1e-15) {
      best = r;
      best_x = x;
    } else {
      break;
    }
  }
  return {best, best_x};
}

}  // namespace

ContractivityReport sample_complete_contractivity(const LinearMatrixMap& psi, int samples, std::uint64_t seed,
                                                  int ascent_steps, std::optional<int> max_level) {
  if (samples < 1) throw PreconditionError("sample_complete_contractivity: samples must be positive");
  ContractivityReport r;
  const int top = max_level.value_or(std::min(psi.grid().cols, psi.shape().cols) + 1);
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const int level = 1 + s % std::max(1, top);
    MatrixTuple x = random_tuple(psi.grid(), level, 1.0, rng);
    auto [ratio, point] = ascend(psi, x, ascent_steps);
    ++r.samples;
    if (ratio > r.max_ratio || r.argmax_level == 0) {
      r.max_ratio = ratio;
      r.argmax = point;
      r.argmax_level = level;
    }
  }
  r.plausibly_cc = r.max_ratio <= 1.0 + 1e-7;
  return r;
}

LinearMatrixMap assemble_map(const Mat& v, const LinearMatrixMap& phi, const Mat& u, Grid grid) {
  const Index dp = v.rows();
  const Index d = u.rows();
  std::vector<Mat> coeffs;
  for (int j = 0; j < grid.rows; ++j) {
    for (int l = 0; l < grid.cols; ++l) {
      Mat block = Mat::Zero(dp, d);
      block(j, l) = 1.0;
      block.bottomRightCorner(dp - grid.rows, d - grid.cols) = phi.at(j, l);
      coeffs.push_back(v * block * u.adjoint());
    }
  }
  return LinearMatrixMap(grid, std::move(coeffs));
}

namespace {

struct Attempt {
  std::vector<Vec> f;
  std::vector<Vec> h;
  double fs_residual = 0.0;
  double h_independence = 0.0;
};

// Splits a maximizing vector into unit f-blocks and checks the inner
// product table and the consistency of h_α = A_{αj} f_j.
Attempt try_vector(const LinearMatrixMap& psi, const Vec& top) {
  const int gp = psi.grid().rows;
  const int g = psi.grid().cols;
  const int d = psi.shape().cols;
  Attempt at;
  // One global phase: making the largest entry of the whole vector real
  // keeps every relation between the blocks intact.
  Index arg = 0;
  top.cwiseAbs().maxCoeff(&arg);
  const Complex phase = std::abs(top(arg)) > 0 ? std::conj(top(arg)) / std::abs(top(arg)) : Complex(1.0);
  for (int l = 0; l < g; ++l) {
    Vec f = top.segment(l * d, d) * phase;
    const double len = f.norm();
    if (len > 0) f /= len;
    at.f.push_back(f);
  }
  for (int a = 0; a < gp; ++a)
    for (int s = 0; s < g; ++s)
      for (int u = 0; u < g; ++u)
        for (int b = 0; b < gp; ++b)
          for (int t = 0; t < g; ++t)
            for (int v = 0; v < g; ++v) {
              const Complex ip = (psi.at(b, t) * at.f[v]).dot(psi.at(a, s) * at.f[u]);
              const double expected = (a == b && s == u && t == v) ? 1.0 : 0.0;
              at.fs_residual = std::max(at.fs_residual, std::abs(ip - expected));
            }
  for (int a = 0; a < gp; ++a) {
    Vec h = psi.at(a, 0) * at.f[0];
    for (int j = 1; j < g; ++j) at.h_independence = std::max(at.h_independence, (psi.at(a, j) * at.f[j] - h).norm());
    at.h.push_back(h);
  }
  return at;
}

}  // namespace

IsometryCertification certify_complete_isometry(const LinearMatrixMap& psi, double tol, std::uint64_t seed) {
  const int gp = psi.grid().rows;
  const int g = psi.grid().cols;
  const int dp = psi.shape().rows;
  const int d = psi.shape().cols;
  IsometryCertification out;
  if (d < g || dp < gp) {
    out.stage = "dimensions";
    out.message = "no complete isometry exists when d < g or d' < g'";
    return out;
  }

  // Stage (i): the test point X with X_{jl} = E_{jl} at level max(g', g).
  const int level = std::max(gp, g);
  std::vector<Mat> entries;
  for (int j = 0; j < gp; ++j)
    for (int l = 0; l < g; ++l) {
      Mat e = Mat::Zero(level, level);
      e(j, l) = 1.0;
      entries.push_back(e);
    }
  const Mat value = amplify(psi, MatrixTuple(psi.grid(), std::move(entries)));
  Eigen::BDCSVD<Mat> svd(value, Eigen::ComputeFullV);
  const RealVec& sv = svd.singularValues();
  const double expected = static_cast<double>(g) * gp;
  const double top_sq = sv(0) * sv(0);
  if (std::abs(top_sq - expected) > tol * expected) {
    out.stage = "test-point norm";
    out.residual = std::abs(top_sq - expected);
    out.message = "squared norm at the test point is " + std::to_string(top_sq) + ", expected " +
                  std::to_string(expected);
    return out;
  }

  // Stage (ii): a maximizing vector satisfying the inner product table.
  Index mult = 1;
  while (mult < sv.size() && sv(mult) >= sv(0) * (1.0 - 1e-9)) ++mult;
  const Mat top_space = svd.matrixV().leftCols(mult);
  std::vector<Vec> candidates;
  for (Index k = 0; k < mult; ++k) candidates.push_back(top_space.col(k));
  if (mult > 1) {
    Rng rng(derive_seed(seed, "iso-degeneracy"));
    for (int t = 0; t < 32; ++t) {
      Vec c = ginibre(mult, 1, rng).col(0);
      candidates.push_back(top_space * c.normalized());
    }
  }
  std::optional<Attempt> chosen;
  double best_fs = std::numeric_limits<double>::infinity();
  int trials = 0;
  for (const auto& c : candidates) {
    ++trials;
    Attempt at = try_vector(psi, c);
    best_fs = std::min(best_fs, std::max(at.fs_residual, at.h_independence));
    if (at.fs_residual <= tol && at.h_independence <= tol) {
      chosen = std::move(at);
      break;
    }
  }
  if (!chosen) {
    out.stage = "inner products";
    out.residual = best_fs;
    out.inconclusive = mult > 1;
    out.message = mult > 1 ? "no tried maximizing vector satisfies the inner product table (degenerate top space)"
                           : "maximizing vector violates the inner product table";
    return out;
  }

  // Stage (iii): unitaries extending F and H.
  Mat f(d, g);
  for (int l = 0; l < g; ++l) f.col(l) = chosen->f[l];
  Mat h(dp, gp);
  for (int a = 0; a < gp; ++a) h.col(a) = chosen->h[a];
  CompleteIsometryCertificate cert;
  cert.u = linalg::complete_to_unitary(f);
  cert.v = linalg::complete_to_unitary(h);
  cert.f_vectors = chosen->f;
  cert.h_vectors = chosen->h;
  cert.fs_residual = chosen->fs_residual;
  cert.h_independence = chosen->h_independence;
  cert.trials = trials;

  // Stage (iv): V* A_{jl} U must be diag(E_{jl}, φ_{jl}).
  std::vector<Mat> phi;
  double corner = 0.0;
  for (int j = 0; j < gp; ++j) {
    for (int l = 0; l < g; ++l) {
      const Mat s = cert.v.adjoint() * psi.at(j, l) * cert.u;
      Mat e = Mat::Zero(gp, g);
      e(j, l) = 1.0;
      corner = std::max(corner, linalg::op_norm(s.topLeftCorner(gp, g) - e));
      cert.off_diagonal = std::max(cert.off_diagonal, linalg::op_norm(s.topRightCorner(gp, d - g)));
      cert.off_diagonal = std::max(cert.off_diagonal, linalg::op_norm(s.bottomLeftCorner(dp - gp, g)));
      phi.push_back(s.bottomRightCorner(dp - gp, d - g));
    }
  }
  cert.phi = LinearMatrixMap(psi.grid(), std::move(phi));
  if (corner > tol || cert.off_diagonal > tol) {
    out.stage = "off-diagonal blocks";
    out.residual = std::max(corner, cert.off_diagonal);
    out.message = "transformed coefficients are not block diagonal";
    return out;
  }
  const LinearMatrixMap rebuilt = assemble_map(cert.v, cert.phi, cert.u, psi.grid());
  for (int k = 0; k < psi.grid().size(); ++k) {
    cert.residual = std::max(cert.residual, linalg::op_norm(rebuilt.coeffs()[k] - psi.coeffs()[k]));
  }
  out.accepted = true;
  out.residual = cert.residual;
  out.certificate = std::move(cert);
  return out;
}

CertificateCheck verify_certificate(const LinearMatrixMap& psi, const CompleteIsometryCertificate& cert,
                                    std::uint64_t seed) {
  CertificateCheck c;
  const LinearMatrixMap rebuilt = assemble_map(cert.v, cert.phi, cert.u, psi.grid());
  for (int k = 0; k < psi.grid().size(); ++k) c.residual += linalg::op_norm(rebuilt.coeffs()[k] - psi.coeffs()[k]);
  c.unitarity = std::max(linalg::op_norm(cert.u * cert.u.adjoint() - Mat::Identity(cert.u.rows(), cert.u.rows())),
                         linalg::op_norm(cert.v * cert.v.adjoint() - Mat::Identity(cert.v.rows(), cert.v.rows())));
  if (cert.phi.shape().rows > 0 && cert.phi.shape().cols > 0) {
    const int level = std::min(psi.grid().cols, cert.phi.shape().cols) + 1;
    auto rep = sample_complete_contractivity(cert.phi, 8, derive_seed(seed, "phi-cc"), 40, level);
    c.phi_max_ratio = rep.max_ratio;
    c.phi_plausibly_cc = rep.plausibly_cc;
  }
  return c;
}

}  // namespace ncball
