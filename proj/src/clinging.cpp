#include "ncball/clinging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ncball/linalg.hpp"
#include "ncball/random.hpp"

namespace ncball {

namespace {

void require_column(const LinearPencil& l) {
  if (l.grid().cols != 1 || l.grid().rows < 1) {
    throw ShapeError("clinging analysis needs a pencil on a g×1 grid, got " + to_string(l.grid()));
  }
}

double scale_of(const GramMatrix& g) { return std::max(1.0, linalg::op_norm(g.g_mat)); }

// Right singular vectors of t with singular value ≤ tol.
Mat small_kernel(const Mat& t, double tol) {
  Eigen::JacobiSVD<Mat> svd(t, Eigen::ComputeFullV);
  const RealVec& s = svd.singularValues();
  const Index n = t.cols();
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

// The k-th smallest singular value (k = 0 is the smallest, counting zeros
// for missing rows).
double kth_smallest_singular(const Mat& t, Index k) {
  RealVec s = linalg::singular_values(t);
  const Index n = t.cols();
  std::vector<double> all(static_cast<std::size_t>(n), 0.0);
  for (Index i = 0; i < std::min<Index>(s.size(), n); ++i) all[static_cast<std::size_t>(i)] = s(i);
  std::sort(all.begin(), all.end());
  return all[static_cast<std::size_t>(std::min(k, n - 1))];
}

Vec normalized(const Vec& v) {
  const double n = v.norm();
  return n > 0 ? Vec(v / n) : v;
}

// Quasi-random points of projective space: the Fibonacci sphere through the
// Hopf map for g = 2, an additive recurrence in 2g real dimensions otherwise.
std::vector<Vec> projective_lattice(int g, int count) {
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  const double pi = std::numbers::pi;
  if (g == 1) {
    out.push_back(Vec::Ones(1));
    return out;
  }
  if (g == 2) {
    const double golden = pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / count;
      const double theta = std::acos(z);
      const double phi = golden * k;
      Vec a(2);
      a(0) = std::cos(theta / 2);
      a(1) = std::polar(std::sin(theta / 2), phi);
      out.push_back(a);
    }
    return out;
  }
  const int dim = 2 * g;
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
  std::vector<double> step(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) step[static_cast<std::size_t>(i)] = std::fmod(std::pow(1.0 / phi, i + 1), 1.0);
  for (int k = 1; k <= count; ++k) {
    Vec a(g);
    for (int j = 0; j < g; ++j) {
      double u1 = std::fmod(0.5 + k * step[static_cast<std::size_t>(2 * j)], 1.0);
      double u2 = std::fmod(0.5 + k * step[static_cast<std::size_t>(2 * j + 1)], 1.0);
      u1 = std::max(u1, 1e-300);
      const double r = std::sqrt(-2.0 * std::log(u1));
      a(j) = std::polar(r, 2 * pi * u2);
    }
    out.push_back(normalized(a));
  }
  return out;
}

struct Pair {
  Vec alpha;
  Vec v;
};

// Greedy basis of span{α ⊗ v}, split so that the first t vectors v are
// independent; normalizes α_1 = 1 when possible.
BindingKernel assemble_kernel(const GramMatrix& gm, const std::vector<Pair>& pairs, double rank_tol) {
  BindingKernel k;
  k.g = gm.g;
  k.d = gm.d;
  const Index n = static_cast<Index>(gm.g) * gm.d;
  std::vector<Pair> basis;
  Mat stack(n, 0);
  for (const Pair& p : pairs) {
    Pair q = p;
    if (std::abs(q.alpha(0)) > 1e-12) {
      const Complex a0 = q.alpha(0);
      q.alpha /= a0;
      q.v *= a0;
    }
    Vec eta(n);
    for (int j = 0; j < gm.g; ++j) eta.segment(j * gm.d, gm.d) = q.alpha(j) * q.v;
    if (eta.norm() == 0.0) continue;
    Mat trial(n, stack.cols() + 1);
    trial << stack, normalized(eta);
    if (linalg::numerical_rank(trial, rank_tol) > stack.cols()) {
      stack = trial;
      basis.push_back(q);
      if (stack.cols() == n) break;
    }
  }
  std::vector<Pair> first, rest;
  Mat vstack(gm.d, 0);
  for (const Pair& p : basis) {
    Mat trial(gm.d, vstack.cols() + 1);
    trial << vstack, normalized(p.v);
    if (linalg::numerical_rank(trial, rank_tol) > vstack.cols()) {
      vstack = trial;
      first.push_back(p);
    } else {
      rest.push_back(p);
    }
  }
  k.t = static_cast<int>(first.size());
  k.m = static_cast<int>(rest.size());
  for (const Pair& p : first) {
    k.alphas.push_back(p.alpha);
    k.vs.push_back(p.v);
  }
  for (const Pair& p : rest) {
    k.alphas.push_back(p.alpha);
    k.vs.push_back(p.v);
  }
  k.gamma = Mat::Zero(k.m, k.t);
  if (k.t > 0 && k.m > 0) {
    Mat vt(gm.d, k.t);
    for (int i = 0; i < k.t; ++i) vt.col(i) = k.vs[static_cast<std::size_t>(i)];
    auto solver = vt.completeOrthogonalDecomposition();
    for (int j = 0; j < k.m; ++j) {
      Vec c = solver.solve(k.vs[static_cast<std::size_t>(k.t + j)]);
      k.gamma.row(j) = c.transpose();
    }
  }
  for (int i = 0; i < k.dim(); ++i) {
    Vec e = k.eta(i);
    k.kernel_residual = std::max(k.kernel_residual, (gm.g_mat * e).norm() / std::max(e.norm(), 1e-300));
  }
  return k;
}

void add_kernel_pairs(const GramMatrix& gm, const Vec& alpha, double tol, std::vector<Pair>& pairs) {
  Mat ker = small_kernel(direction_operator(gm, alpha), tol);
  for (Index c = 0; c < ker.cols(); ++c) pairs.push_back({alpha, ker.col(c)});
}

}  // namespace

Vec BindingKernel::eta(int i) const {
  const Vec& a = alphas.at(static_cast<std::size_t>(i));
  const Vec& v = vs.at(static_cast<std::size_t>(i));
  Vec out(static_cast<Index>(g) * d);
  for (int j = 0; j < g; ++j) out.segment(j * d, d) = a(j) * v;
  return out;
}

GramMatrix gram_of_delta(const LinearPencil& l) {
  require_column(l);
  GramMatrix gm;
  gm.g = l.grid().rows;
  gm.d = static_cast<int>(l.shape().cols);
  const Index dp = l.shape().rows;
  Mat m(dp, static_cast<Index>(gm.g) * gm.d);
  for (int j = 0; j < gm.g; ++j) m.middleCols(j * gm.d, gm.d) = l.at(j, 0);
  gm.g_mat = Mat::Identity(m.cols(), m.cols()) - m.adjoint() * m;
  return gm;
}

Mat delta_eval(const LinearPencil& l, const MatrixTuple& x) {
  require_column(l);
  if (x.grid().rows != l.grid().rows || x.grid().cols != 1) {
    throw ShapeError("point grid " + to_string(x.grid()) + " does not match pencil grid " + to_string(l.grid()));
  }
  const Index n = x.level();
  Mat sum = Mat::Zero(n, n);
  for (const Mat& xj : x.entries()) sum += xj.adjoint() * xj;
  Mat lx = pencil_eval(l, x);
  return linalg::kron(Mat::Identity(l.shape().cols, l.shape().cols), sum) - lx.adjoint() * lx;
}

Mat gram_form_eval(const GramMatrix& gm, const MatrixTuple& x) {
  if (x.grid().rows != gm.g || x.grid().cols != 1) {
    throw ShapeError("point grid " + to_string(x.grid()) + " does not match " + std::to_string(gm.g) + "x1");
  }
  const Index n = x.level();
  const Index dn = static_cast<Index>(gm.d) * n;
  Mat hat(static_cast<Index>(gm.g) * dn, dn);
  const Mat id = Mat::Identity(gm.d, gm.d);
  for (int j = 0; j < gm.g; ++j) hat.middleRows(j * dn, dn) = linalg::kron(id, x.at(j, 0));
  Mat big = linalg::kron(gm.g_mat, Mat::Identity(n, n));
  return hat.adjoint() * big * hat;
}

PsdReport delta_psd(const GramMatrix& gm) {
  PsdReport r;
  linalg::ExtremeEigen e = linalg::min_eigen(gm.g_mat);
  r.min_eigenvalue = e.value;
  r.psd = e.value >= -1e-9 * scale_of(gm);
  if (r.psd) return r;
  const Index d = gm.d;
  MatrixTuple x(Grid{gm.g, 1}, d);
  for (int i = 0; i < gm.g; ++i) {
    Mat xi = Mat::Zero(d, d);
    xi.row(0) = e.vector.segment(i * d, d).transpose();
    x.at(i, 0) = xi;
  }
  r.witness_value = linalg::min_eigen(gram_form_eval(gm, x)).value;
  r.witness = std::move(x);
  return r;
}

Mat direction_operator(const GramMatrix& gm, const Vec& alpha) {
  if (alpha.size() != gm.g) throw ShapeError("direction has " + std::to_string(alpha.size()) + " entries");
  const Index d = gm.d;
  Mat t = Mat::Zero(static_cast<Index>(gm.g) * d, d);
  for (int j = 0; j < gm.g; ++j) t += alpha(j) * gm.g_mat.middleCols(j * d, d);
  return t;
}

ScalarClinging clinging_scalar_sampled(const GramMatrix& gm, int directions, std::uint64_t seed, bool refine) {
  ScalarClinging out;
  const double scale = scale_of(gm);
  const double tol = 1e-9 * scale;
  const Index d = gm.d;
  std::vector<Vec> lattice = projective_lattice(gm.g, directions);
  std::vector<double> next_sv(lattice.size(), 0.0);
  Index generic = d;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    Mat t = direction_operator(gm, lattice[i]);
    Index k = small_kernel(t, tol).cols();
    if (k < generic) generic = k;
    if (k == 0 && !out.failing_direction) out.failing_direction = lattice[i];
  }
  out.generic_kernel_dim = generic;
  out.clings = generic > 0;
  out.kernel.heuristic = true;
  if (!out.clings) {
    out.kernel.g = gm.g;
    out.kernel.d = gm.d;
    return out;
  }
  std::vector<Pair> pairs;
  const std::size_t generic_budget = static_cast<std::size_t>(gm.g * d + 8);
  for (std::size_t i = 0; i < lattice.size() && i < generic_budget; ++i) {
    add_kernel_pairs(gm, lattice[i], tol, pairs);
  }
  if (refine && generic < d) {
    for (std::size_t i = 0; i < lattice.size(); ++i) {
      next_sv[i] = kth_smallest_singular(direction_operator(gm, lattice[i]), generic);
    }
    std::vector<std::size_t> order(lattice.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return next_sv[a] < next_sv[b]; });
    Rng rng(derive_seed(seed, "cling-refine"));
    const std::size_t starts = std::min<std::size_t>(16, order.size());
    for (std::size_t s = 0; s < starts; ++s) {
      Vec a = lattice[order[s]];
      double val = next_sv[order[s]];
      double step = 0.05;
      int failures = 0;
      for (int it = 0; it < 300 && val > 1e-12 * scale; ++it) {
        Vec b = normalized(a + step * ginibre(gm.g, 1, rng).col(0));
        const double vb = kth_smallest_singular(direction_operator(gm, b), generic);
        if (vb < val) {
          a = b;
          val = vb;
          failures = 0;
        } else if (++failures >= 4) {
          step *= 0.5;
          failures = 0;
        }
      }
      if (val <= 1e-7 * scale) {
        bool seen = false;
        for (const Vec& sd : out.special_directions) {
          if (std::abs(std::abs(sd.dot(a)) - 1.0) < 1e-6) seen = true;
        }
        if (!seen) {
          out.special_directions.push_back(a);
          add_kernel_pairs(gm, a, 1e-6 * scale, pairs);
        }
      }
    }
  }
  out.kernel = assemble_kernel(gm, pairs, 1e-6);
  out.kernel.heuristic = true;
  return out;
}

ScalarClinging clinging_scalar(const GramMatrix& gm, std::uint64_t seed) {
  if (gm.g != 2) return clinging_scalar_sampled(gm, 2048, seed, true);
  ScalarClinging out;
  const double scale = scale_of(gm);
  const double tol = 1e-9 * scale;
  const Index d = gm.d;
  const Mat k1 = gm.g_mat.middleCols(0, d);
  const Mat k2 = gm.g_mat.middleCols(d, d);
  Rng rng(derive_seed(seed, "cling-pencil"));
  auto dir = [](Complex lambda) {
    Vec a(2);
    a << 1.0, lambda;
    return normalized(a);
  };
  std::vector<Complex> generic_lambdas;
  for (int i = 0; i < gm.g * d + 4; ++i) generic_lambdas.push_back(ginibre(1, 1, rng)(0, 0));
  Index rank = 0;
  for (int i = 0; i < 3; ++i) {
    rank = std::max(rank, d - small_kernel(k1 + generic_lambdas[static_cast<std::size_t>(i)] * k2, tol).cols());
  }
  out.generic_kernel_dim = d - rank;
  out.clings = rank < d;
  out.kernel.exact_path = true;
  if (!out.clings) {
    out.failing_direction = dir(generic_lambdas[0]);
    out.kernel.g = gm.g;
    out.kernel.d = gm.d;
    out.kernel.exact_path = true;
    return out;
  }
  std::vector<Pair> pairs;
  for (Complex l : generic_lambdas) add_kernel_pairs(gm, dir(l), tol, pairs);
  Vec inf(2);
  inf << 0.0, 1.0;
  if (small_kernel(k2, tol).cols() > d - rank) out.special_directions.push_back(inf);
  add_kernel_pairs(gm, inf, tol, pairs);
  if (rank > 0) {
    // Rank-dropping values of K_1 + λK_2 are eigenvalues of a generic
    // square compression; each candidate is confirmed on the full pencil.
    const Mat w = ginibre(rank, 2 * d, rng);
    const Mat z = ginibre(d, rank, rng);
    const Mat a = w * k1 * z;
    const Mat b = w * k2 * z;
    const Complex sigma = ginibre(1, 1, rng)(0, 0);
    const Mat shifted = a + sigma * b;
    Mat mm = shifted.partialPivLu().solve(b);
    Eigen::ComplexEigenSolver<Mat> es(mm);
    std::vector<Complex> found;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
      const Complex mu = es.eigenvalues()(i);
      if (std::abs(mu) < 1e-12) continue;
      const Complex lambda = sigma - 1.0 / mu;
      bool dup = false;
      for (Complex f : found) {
        if (std::abs(f - lambda) < 1e-8 * std::max(1.0, std::abs(lambda))) dup = true;
      }
      if (dup) continue;
      const Vec alpha = dir(lambda);
      const Mat t = direction_operator(gm, alpha);
      if (small_kernel(t, 1e-8 * scale).cols() > d - rank) {
        found.push_back(lambda);
        out.special_directions.push_back(alpha);
        add_kernel_pairs(gm, alpha, 1e-8 * scale, pairs);
      }
    }
  }
  out.kernel = assemble_kernel(gm, pairs, 1e-6);
  out.kernel.exact_path = true;
  return out;
}

OrthotropicReport orthotropic_check(const LinearPencil& l, double tol) {
  require_column(l);
  OrthotropicReport r;
  const Mat& a1 = l.at(0, 0);
  Eigen::JacobiSVD<Mat> svd(a1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVec& s = svd.singularValues();
  r.top_singular = s.size() > 0 ? s(0) : 0.0;
  r.normalized = std::abs(r.top_singular - 1.0) <= tol;
  for (Index i = 0; i < s.size(); ++i) {
    if (std::abs(s(i) - r.top_singular) <= tol) ++r.multiplicity;
  }
  const Mat p = svd.matrixU();
  const Mat q = svd.matrixV();
  std::vector<Mat> coeffs;
  for (const Mat& a : l.coeffs()) coeffs.push_back(p.adjoint() * a * q);
  r.normalized_pencil = LinearPencil(l.grid(), coeffs);
  const Index k = r.multiplicity;
  const Index d = a1.cols();
  double worst = 0.0;
  for (std::size_t j = 1; j < coeffs.size(); ++j) {
    const double nrm = (k > 0 && d > k) ? linalg::op_norm(coeffs[j].block(0, k, k, d - k)) : 0.0;
    r.offdiag_norms.push_back(nrm);
    worst = std::max(worst, nrm);
  }
  if (!r.normalized) {
    r.message = "top singular value of A_1 is " + std::to_string(r.top_singular) + ", not 1";
  } else if (worst > tol) {
    r.message = "off-diagonal block norm " + std::to_string(worst);
  }
  r.pass = r.normalized && worst <= tol;
  return r;
}

BindSystemResult bind_system_solve(const BindingKernel& k, const std::vector<Mat>& z) {
  if (static_cast<int>(z.size()) != k.g - 1) {
    throw ShapeError("need " + std::to_string(k.g - 1) + " matrices Z_2..Z_g, got " + std::to_string(z.size()));
  }
  BindSystemResult out;
  const Index n = z.empty() ? 1 : z.front().rows();
  for (const Mat& zk : z) {
    if (zk.rows() != n || zk.cols() != n) throw ShapeError("Z matrices must be square of equal size");
  }
  const int t = k.t;
  const int m = k.m;
  const Index unknowns = static_cast<Index>(t + m) * n;
  const Index eqs = static_cast<Index>(t) * (k.g - 1) * n;
  out.unknowns = unknowns;
  out.equations = eqs;
  const Mat id = Mat::Identity(n, n);
  auto op = [&](int idx, int kk) {
    const Vec& a = k.alphas[static_cast<std::size_t>(idx)];
    return Mat(z[static_cast<std::size_t>(kk - 1)] * a(0) - a(kk) * id);
  };
  Mat e = Mat::Zero(eqs, unknowns);
  for (int i = 0; i < t; ++i) {
    for (int kk = 1; kk < k.g; ++kk) {
      const Index row = (static_cast<Index>(i) * (k.g - 1) + (kk - 1)) * n;
      e.block(row, static_cast<Index>(i) * n, n, n) = op(i, kk);
      for (int j = 0; j < m; ++j) {
        e.block(row, static_cast<Index>(t + j) * n, n, n) = k.gamma(j, i) * op(t + j, kk);
      }
    }
  }
  Mat ns = eqs > 0 ? linalg::null_space(e) : Mat(Mat::Identity(unknowns, unknowns));
  out.nullity = ns.cols();
  // r ↦ (α_{i,1} r_i + Σ_j γ_{ji} α_{t+j,1} r_{t+j})_i, whose image is v.
  Mat rmap = Mat::Zero(static_cast<Index>(t) * n, unknowns);
  for (int i = 0; i < t; ++i) {
    rmap.block(static_cast<Index>(i) * n, static_cast<Index>(i) * n, n, n) = k.alphas[static_cast<std::size_t>(i)](0) * id;
    for (int j = 0; j < m; ++j) {
      rmap.block(static_cast<Index>(i) * n, static_cast<Index>(t + j) * n, n, n) =
          k.gamma(j, i) * k.alphas[static_cast<std::size_t>(t + j)](0) * id;
    }
  }
  if (ns.cols() == 0 || unknowns == 0) return out;
  Mat image = rmap * ns;
  Eigen::JacobiSVD<Mat> svd(image, Eigen::ComputeFullV);
  const double top = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  out.solvable = top > 1e-8;
  Vec sol = ns * svd.matrixV().col(0);
  for (int i = 0; i < t + m; ++i) out.r.push_back(sol.segment(static_cast<Index>(i) * n, n));

  bool unit_first = true;
  for (const Vec& a : k.alphas) {
    if (std::abs(a(0) - 1.0) > 1e-12) unit_first = false;
  }
  if (!unit_first || !out.solvable) return out;
  double worst = 0.0;
  for (int i = 0; i < t; ++i) {
    for (int kk = 1; kk < k.g; ++kk) {
      const Mat base = z[static_cast<std::size_t>(kk - 1)] - k.alphas[static_cast<std::size_t>(i)](kk) * id;
      if (linalg::condition_number(base) > 1e10) return out;
      Vec rhs = Vec::Zero(n);
      for (int j = 0; j < m; ++j) {
        const Mat other = z[static_cast<std::size_t>(kk - 1)] - k.alphas[static_cast<std::size_t>(t + j)](kk) * id;
        rhs += k.gamma(j, i) * (other * out.r[static_cast<std::size_t>(t + j)]);
      }
      Vec ri = -base.partialPivLu().solve(rhs);
      worst = std::max(worst, (ri - out.r[static_cast<std::size_t>(i)]).norm());
    }
  }
  out.reduced_form_checked = true;
  out.reduced_form_residual = worst;
  return out;
}

bool theorem_9_4_applies(const BindingKernel& k) { return k.t * (k.g - 2) < k.m; }

std::string to_string(ClingVerdict v) {
  switch (v) {
    case ClingVerdict::proved_by_9_4:
      return "proved_by_9_4";
    case ClingVerdict::verified_by_sampling:
      return "verified_by_sampling";
    case ClingVerdict::refuted:
      return "refuted";
    case ClingVerdict::unknown:
      return "unknown";
  }
  return "unknown";
}

ClingingReport matrix_clinging_sample(const LinearPencil& l, int levels, int samples, std::uint64_t seed) {
  require_column(l);
  if (levels < 1) throw PreconditionError("levels must be at least 1");
  ClingingReport r;
  GramMatrix gm = gram_of_delta(l);
  PsdReport psd = delta_psd(gm);
  r.psd = psd.psd;
  r.gram_min_eigenvalue = psd.min_eigenvalue;
  if (!psd.psd) {
    r.verdict = ClingVerdict::refuted;
    r.refuting_point = psd.witness;
    return r;
  }
  ScalarClinging sc = clinging_scalar(gm, seed);
  r.clings_scalar = sc.clings;
  r.t = sc.kernel.t;
  r.m = sc.kernel.m;
  r.heuristic_kernel = sc.kernel.heuristic;
  if (!sc.clings) {
    r.verdict = ClingVerdict::refuted;
    MatrixTuple x(Grid{gm.g, 1}, 1);
    for (int j = 0; j < gm.g; ++j) x.at(j, 0) = Mat::Constant(1, 1, (*sc.failing_direction)(j));
    r.refuting_point = std::move(x);
    return r;
  }
  r.applies_9_4 = theorem_9_4_applies(sc.kernel);
  Rng rng(derive_seed(seed, "cling-sample"));
  bool refuted = false;
  bool all_small = true;
  for (int s = 0; s < samples; ++s) {
    const Index level = 1 + s % levels;
    MatrixTuple x = random_tuple(l.grid(), level, 1.0, rng);
    Mat sum = Mat::Zero(level, level);
    for (const Mat& xj : x.entries()) sum += xj.adjoint() * xj;
    const double scale = std::max(linalg::op_norm(sum), 1e-300);
    const double v = linalg::min_eigen(delta_eval(l, x)).value;
    r.min_singular_samples.push_back(v);
    r.max_sample = std::max(r.max_sample, v);
    if (v > 1e-6 && !refuted) {
      refuted = true;
      r.refuting_point = x;
    }
    if (v > 1e-7 * scale) all_small = false;
  }
  if (refuted) {
    r.verdict = ClingVerdict::refuted;
  } else if (r.applies_9_4 && !sc.kernel.heuristic) {
    r.verdict = ClingVerdict::proved_by_9_4;
  } else if (all_small) {
    r.verdict = ClingVerdict::verified_by_sampling;
  }
  return r;
}

bool search_filters(const LinearPencil& l, std::uint64_t seed, BindingKernel* kernel) {
  if (!orthotropic_check(l).pass) return false;
  GramMatrix gm = gram_of_delta(l);
  if (!delta_psd(gm).psd) return false;
  ScalarClinging sc = clinging_scalar(gm, seed);
  if (kernel) *kernel = sc.kernel;
  return sc.clings;
}

namespace {

// A pencil isometric on a subspace containing every α ⊗ Φα and strictly
// contractive on its complement, so the Gram matrix is PSD and clings.
LinearPencil build_search_pencil(int max_d, Rng& rng) {
  const int g = 3;
  const int d = max_d >= 2 ? 2 + static_cast<int>(uniform(rng) * (max_d - 1)) : 1;
  const Index n = static_cast<Index>(g) * d;
  const Mat phi = ginibre(d, g, rng);
  Mat gens(n, 0);
  for (int a = 0; a < g; ++a) {
    for (int b = a; b < g; ++b) {
      Vec v = Vec::Zero(n);
      v.segment(a * d, d) += phi.col(b);
      v.segment(b * d, d) += phi.col(a);
      gens.conservativeResize(n, gens.cols() + 1);
      gens.col(gens.cols() - 1) = v;
    }
  }
  if (uniform(rng) < 0.5) {
    gens.conservativeResize(n, gens.cols() + 1);
    gens.col(gens.cols() - 1) = ginibre(n, 1, rng).col(0);
  }
  const Mat qs = linalg::range_basis(gens);
  const Mat full = linalg::complete_to_unitary(qs);
  const Index s = qs.cols();
  const Index rest = n - s;
  const Index r = rest > 0 ? static_cast<Index>(uniform(rng) * (std::min<Index>(rest, 2) + 1)) : 0;
  Mat small(s + r, n);
  small.topRows(s) = qs.adjoint();
  if (r > 0) {
    const Mat c = random_with_norm(r, rest, 0.5 + 0.4 * uniform(rng), rng);
    small.bottomRows(r) = c * full.rightCols(rest).adjoint();
  }
  const Mat m = random_unitary(s + r, rng) * small;
  std::vector<Mat> coeffs;
  for (int j = 0; j < g; ++j) coeffs.push_back(m.middleCols(j * d, d));
  return LinearPencil(Grid{g, 1}, coeffs);
}

double margin_at(const LinearPencil& l, const MatrixTuple& x) {
  const double nrm = x.norm();
  if (nrm == 0.0) return 0.0;
  return linalg::min_eigen(delta_eval(l, x)).value / (nrm * nrm);
}

}  // namespace

SearchReport three_var_search(int budget, std::uint64_t seed, int max_d, int max_level, double margin) {
  SearchReport rep;
  if (budget <= 0) return rep;
  if (max_level < 1) throw PreconditionError("max_level must be at least 1");
  for (int idx = 0; idx < budget; ++idx) {
    Rng rng(derive_seed(seed, "three-var-" + std::to_string(idx)));
    LinearPencil l = build_search_pencil(max_d, rng);
    ++rep.constructed;
    BindingKernel kernel;
    if (!search_filters(l, derive_seed(seed, "filters-" + std::to_string(idx)), &kernel)) continue;
    ++rep.passed_filters;
    if (theorem_9_4_applies(kernel) && !kernel.heuristic) {
      ++rep.theorem_covered;
      continue;
    }
    SearchCandidate best;
    best.margin = -1e300;
    for (int trial = 0; trial < 8; ++trial) {
      const Index level = max_level >= 2 ? 2 + trial % (max_level - 1) : 1;
      MatrixTuple x = random_tuple(l.grid(), level, 1.0, rng);
      double val = margin_at(l, x);
      double step = 0.2;
      for (int it = 0; it < 30; ++it) {
        MatrixTuple y = x + random_tuple(l.grid(), level, step, rng);
        const double vy = margin_at(l, y);
        if (vy > val) {
          x = y;
          val = vy;
        } else {
          step *= 0.7;
        }
      }
      if (val > best.margin) {
        best.margin = val;
        best.point = x;
      }
    }
    if (best.margin > margin) {
      best.index = idx;
      best.pencil = l;
      best.t = kernel.t;
      best.m = kernel.m;
      rep.candidates.push_back(best);
    }
  }
  return rep;
}

}  // namespace ncball
