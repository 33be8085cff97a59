#include "opkernel/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opkernel/errors.hpp"

namespace opk {

HermitianMatrix hermitize(const CMatrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("hermitize: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected square");
  }
  const Index n = m.rows();
  HermitianMatrix out;
  out.m_.resize(n, n);
  double defect = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const Complex a = m(i, j);
      const Complex b = std::conj(m(j, i));
      defect = std::max(defect, std::abs(a - b));
      // Entry (j,i) is computed from the same two operands, so the result is
      // Hermitian bit-for-bit.
      out.m_(i, j) = (a + b) * 0.5;
    }
  }
  out.defect_ = defect;
  out.symmetrized_ = true;
  return out;
}

Index SpectralDecomposition::rank() const {
  if (eigenvalues.size() == 0) return 0;
  const double cutoff = rank_tol * std::max(eigenvalues(0), 0.0);
  Index r = 0;
  for (Index k = 0; k < eigenvalues.size(); ++k) {
    if (eigenvalues(k) > cutoff) ++r;
  }
  return r;
}

double SpectralDecomposition::max_abs_eigenvalue() const {
  return eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
}

CMatrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

SpectralDecomposition spectral(const HermitianMatrix& m, double rank_tol) {
  SpectralDecomposition out;
  out.rank_tol = rank_tol;
  const Index n = m.dim();
  if (n == 0) {
    out.eigenvalues.resize(0);
    out.eigenvectors.resize(0, 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigensolver_failed", "Hermitian eigensolver did not converge");
  }
  // Eigen returns ascending order.
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

PsdVerdict psd_check(const HermitianMatrix& m, double tol) {
  if (m.dim() == 0) return {true, 0.0};
  const SpectralDecomposition sd = spectral(m);
  const double min_eig = sd.eigenvalues(sd.eigenvalues.size() - 1);
  const double scale = 1.0 + sd.max_abs_eigenvalue();
  return {min_eig >= -tol * scale, min_eig};
}

HermitianMatrix psd_sqrt(const HermitianMatrix& m, double tol) {
  if (m.dim() == 0) return m;
  SpectralDecomposition sd = spectral(m);
  const double scale = 1.0 + sd.max_abs_eigenvalue();
  const double min_eig = sd.eigenvalues(sd.eigenvalues.size() - 1);
  if (min_eig < -tol * scale) {
    throw PreconditionError("not_psd", "psd_sqrt: minimum eigenvalue " + std::to_string(min_eig) +
                                           " is below tolerance");
  }
  RVector roots = sd.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return hermitize(sd.eigenvectors * roots.cast<Complex>().asDiagonal() *
                   sd.eigenvectors.adjoint());
}

PseudoInverse pinv(const HermitianMatrix& m, double rank_tol) {
  const Index n = m.dim();
  const SpectralDecomposition sd = spectral(m, rank_tol);
  const Index r = sd.rank();
  CVector inv = CVector::Zero(r);
  for (Index k = 0; k < r; ++k) inv(k) = 1.0 / sd.eigenvalues(k);
  const auto u = sd.eigenvectors.leftCols(r);
  PseudoInverse out;
  out.rank = r;
  if (r == 0) {
    out.pseudo_inverse = hermitize(CMatrix::Zero(n, n));
    out.range_projector = hermitize(CMatrix::Zero(n, n));
  } else {
    out.pseudo_inverse = hermitize(u * inv.asDiagonal() * u.adjoint());
    out.range_projector = hermitize(u * u.adjoint());
  }
  return out;
}

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

Index matrix_rank(const CMatrix& m, double rank_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const RVector& s = svd.singularValues();
  const double cutoff = rank_tol * s(0);
  Index r = 0;
  for (Index k = 0; k < s.size(); ++k) {
    if (s(k) > cutoff) ++r;
  }
  return r;
}

}  // namespace opk
