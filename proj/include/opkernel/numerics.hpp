#pragma once

#include <complex>

#include <Eigen/Dense>

namespace opk {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// An element of L(H): a complex h x h matrix. Kernel values K(s,t) are
/// HOperators; they are Hermitian only on the diagonal s = t.
using HOperator = CMatrix;

/// Relative tolerance for PSD verdicts: min eigenvalue >= -psd * (1 + max|lambda|).
inline constexpr double kPsdTol = 1e-10;
/// Relative rank cutoff: lambda counts when lambda > rank * max(lambda_max, 0).
inline constexpr double kRankTol = 1e-12;

/// A square matrix that is exactly equal to its conjugate transpose.
///
/// The only way to build one is `hermitize`, which applies (M + M*)/2 and
/// records how far the input was from Hermitian.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  const CMatrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  /// max-norm of M - M* for the matrix this was built from.
  double defect() const noexcept { return defect_; }
  bool symmetrized() const noexcept { return symmetrized_; }

 private:
  friend HermitianMatrix hermitize(const CMatrix& m);

  CMatrix m_;
  double defect_ = 0.0;
  bool symmetrized_ = false;
};

/// Returns (M + M*)/2. Throws DimensionError for non-square input.
HermitianMatrix hermitize(const CMatrix& m);

/// Eigen-decomposition with eigenvalues sorted in descending order.
struct SpectralDecomposition {
  RVector eigenvalues;
  CMatrix eigenvectors;
  double rank_tol = kRankTol;

  /// Count of eigenvalues above rank_tol * max(lambda_max, 0).
  Index rank() const;
  double max_abs_eigenvalue() const;
  CMatrix reconstruct() const;
};

SpectralDecomposition spectral(const HermitianMatrix& m, double rank_tol = kRankTol);

struct PsdVerdict {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
};

PsdVerdict psd_check(const HermitianMatrix& m, double tol = kPsdTol);

/// Unique PSD square root. Eigenvalues in [-tol*scale, 0) are clamped to 0;
/// anything more negative raises PreconditionError("not_psd").
HermitianMatrix psd_sqrt(const HermitianMatrix& m, double tol = kPsdTol);

struct PseudoInverse {
  HermitianMatrix pseudo_inverse;
  HermitianMatrix range_projector;
  Index rank = 0;
};

/// Spectral pseudo-inverse of a PSD matrix together with the orthogonal
/// projector onto its range.
PseudoInverse pinv(const HermitianMatrix& m, double rank_tol = kRankTol);

/// Entrywise max-norm.
double max_abs(const CMatrix& m);

/// Largest singular value.
double spectral_norm(const CMatrix& m);

/// Numerical rank of an arbitrary matrix from its singular values.
Index matrix_rank(const CMatrix& m, double rank_tol = kRankTol);

}  // namespace opk
