#include "ncball/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ncball {

std::string to_string(const Grid& g) {
  return std::to_string(g.rows) + "x" + std::to_string(g.cols);
}

std::string to_string(const Shape& s) {
  return std::to_string(s.rows) + "x" + std::to_string(s.cols);
}

namespace linalg {

namespace {

// BDCSVD switches to Jacobi below its block size, so it is safe everywhere.
Eigen::BDCSVD<Mat> thin_svd(const Mat& m, unsigned options) { return Eigen::BDCSVD<Mat>(m, options); }

}  // namespace

double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  return thin_svd(m, 0).singularValues()(0);
}

RealVec singular_values(const Mat& m) {
  if (m.size() == 0) return RealVec();
  return thin_svd(m, 0).singularValues();
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Mat swap_kron_factors(const Mat& m, Index ar, Index ac, Index br, Index bc) {
  if (m.rows() != ar * br || m.cols() != ac * bc) {
    throw ShapeError("swap_kron_factors: matrix is not (ar*br)x(ac*bc)");
  }
  Mat out(m.rows(), m.cols());
  for (Index i1 = 0; i1 < ar; ++i1)
    for (Index i2 = 0; i2 < br; ++i2)
      for (Index j1 = 0; j1 < ac; ++j1)
        for (Index j2 = 0; j2 < bc; ++j2)
          out(i2 * ar + i1, j2 * ac + j1) = m(i1 * br + i2, j1 * bc + j2);
  return out;
}

HermitianPart hermitian_part(const Mat& m) {
  if (m.rows() != m.cols()) throw ShapeError("hermitian_part: matrix is not square");
  HermitianPart out;
  Mat skew = (m - m.adjoint()) * 0.5;
  out.h = (m + m.adjoint()) * 0.5;
  out.asymmetry = skew.size() == 0 ? 0.0 : skew.cwiseAbs().maxCoeff();
  if (out.asymmetry > 0.0) out.asymmetry = op_norm(skew);
  return out;
}

Mat checked_hermitian(const Mat& m, double tol) {
  auto part = hermitian_part(m);
  double scale = std::max(1.0, part.h.size() == 0 ? 0.0 : part.h.cwiseAbs().maxCoeff());
  if (part.asymmetry > tol * scale) {
    throw PreconditionError("matrix is not Hermitian (asymmetry " + std::to_string(part.asymmetry) + ")");
  }
  return std::move(part.h);
}

RealVec hermitian_eigenvalues(const Mat& m) {
  Mat h = checked_hermitian(m);
  if (h.size() == 0) return RealVec();
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

ExtremeEigen min_eigen(const Mat& m) {
  Mat h = checked_hermitian(m);
  ExtremeEigen out;
  if (h.size() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  out.value = es.eigenvalues()(0);
  out.vector = es.eigenvectors().col(0);
  return out;
}

Mat psd_sqrt(const Mat& m, double clamp) {
  Mat h = checked_hermitian(m);
  if (h.size() == 0) return h;
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  RealVec ev = es.eigenvalues();
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < 0.0) {
      if (ev(i) < -clamp) throw PreconditionError("psd_sqrt: matrix has a negative eigenvalue");
      ev(i) = 0.0;
    } else if (ev(i) < clamp) {
      ev(i) = 0.0;
    }
    ev(i) = std::sqrt(ev(i));
  }
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

Index numerical_rank(const Mat& m, double rel_tol, double abs_floor) {
  RealVec s = singular_values(m);
  if (s.size() == 0 || s(0) <= abs_floor) return 0;
  const double cut = std::max(rel_tol * s(0), abs_floor);
  Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return r;
}

Mat null_space(const Mat& m, double rel_tol, double abs_floor) {
  const Index n = m.cols();
  if (m.rows() == 0) return Mat::Identity(n, n);
  // Square up short matrices so V is n×n.
  Mat work = m;
  if (work.rows() < n) {
    work.conservativeResize(n, Eigen::NoChange);
    work.bottomRows(n - m.rows()).setZero();
  }
  Eigen::BDCSVD<Mat> svd(work, Eigen::ComputeFullV);
  const RealVec& s = svd.singularValues();
  Index r = 0;
  if (s.size() > 0 && s(0) > abs_floor) {
    const double cut = std::max(rel_tol * s(0), abs_floor);
    while (r < s.size() && s(r) > cut) ++r;
  }
  return svd.matrixV().rightCols(n - r);
}

Mat range_basis(const Mat& m, double rel_tol) {
  if (m.size() == 0) return Mat(m.rows(), 0);
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU);
  const RealVec& s = svd.singularValues();
  Index r = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    while (r < s.size() && s(r) > rel_tol * s(0)) ++r;
  }
  return svd.matrixU().leftCols(r);
}

Mat complete_to_unitary(const Mat& q) {
  const Index n = q.rows();
  const Index k = q.cols();
  if (k > n) throw ShapeError("complete_to_unitary: more columns than rows");
  Mat u(n, n);
  u.leftCols(k) = q;
  Index filled = k;
  for (Index e = 0; e < n && filled < n; ++e) {
    Vec v = Vec::Zero(n);
    v(e) = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < filled; ++j) v -= u.col(j) * u.col(j).dot(v);
    }
    const double len = v.norm();
    if (len > 1e-8) u.col(filled++) = v / len;
  }
  if (filled != n) throw PreconditionError("complete_to_unitary: input columns are not independent");
  return u;
}

Mat polar_factor(const Mat& m) {
  if (m.size() == 0) return m;
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double isometry_defect(const Mat& q) {
  if (q.cols() == 0) return 0.0;
  return op_norm(q.adjoint() * q - Mat::Identity(q.cols(), q.cols()));
}

double condition_number(const Mat& m) {
  RealVec s = singular_values(m);
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

}  // namespace linalg
}  // namespace ncball
