#pragma once

#include <vector>

#include "opkernel/numerics.hpp"

namespace opk {

/// A linear map M_d -> M_h stored as its Choi matrix.
///
/// The Choi matrix is dh x dh with block (i,j) equal to psi(E_ij), where E_ij
/// is the d x d matrix unit; the row index of entry (a, b) inside block (i, j)
/// is i*h + a and the column index is j*h + b.
class CpMap {
 public:
  CpMap() = default;

  /// Builds a map from its Choi matrix. The matrix is hermitized; a Choi
  /// matrix that is materially non-Hermitian is rejected.
  static CpMap from_choi(Index d, Index h, const CMatrix& choi);

  /// psi(A) = sum_k V_k A V_k^*, each V_k an h x d matrix.
  static CpMap from_kraus(Index d, Index h, const std::vector<CMatrix>& kraus);

  /// Builds the Choi matrix of a map given by its action on the matrix units.
  static CpMap from_action(Index d, Index h, const std::vector<CMatrix>& images);

  Index d() const noexcept { return d_; }
  Index h() const noexcept { return h_; }
  const HermitianMatrix& choi() const noexcept { return choi_; }

  /// psi(E_ij).
  CMatrix unit_image(Index i, Index j) const;

  CpMap scaled(double factor) const;

 private:
  Index d_ = 0;
  Index h_ = 0;
  HermitianMatrix choi_;
};

/// psi(A) evaluated through the Choi blocks: sum_ij A_ij psi(E_ij).
CMatrix apply(const CpMap& psi, const CMatrix& a);

/// d x d matrix unit E_ij.
CMatrix matrix_unit(Index d, Index i, Index j);

}  // namespace opk
