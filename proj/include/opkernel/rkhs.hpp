#pragma once

#include <memory>

#include "opkernel/kernels.hpp"

namespace opk {

enum class FactorMode { eigen, cholesky };

/// Per-point factors V(s_i): H -> C^r with K(s_i,s_j) = V(s_i)^* V(s_j).
///
/// The factors are stored side by side in one r x nh matrix, so column
/// i*h + a is V(s_i) e_a, the kernel section at (s_i, e_a).
class FactorSystem {
 public:
  FactorSystem() = default;
  FactorSystem(CMatrix stacked, std::shared_ptr<const BlockGram> source, FactorMode mode);

  Index r() const noexcept { return stacked_.rows(); }
  Index n() const noexcept { return source_->n(); }
  Index h() const noexcept { return source_->h(); }
  FactorMode mode() const noexcept { return mode_; }
  const CMatrix& stacked() const noexcept { return stacked_; }
  const BlockGram& source() const noexcept { return *source_; }

  /// V(s_i), an r x h matrix.
  CMatrix factor(Index i) const;

  /// max_ij ||V(s_i)^* V(s_j) - G_ij||_max.
  double reconstruction_error() const;

 private:
  CMatrix stacked_;
  std::shared_ptr<const BlockGram> source_;
  FactorMode mode_ = FactorMode::eigen;
};

/// Eigen mode keeps r = numerical rank (minimal); Cholesky mode returns
/// r = nh from a pivoted LDL^* decomposition. Non-PSD Grams are rejected.
FactorSystem factorize(const BlockGram& gram, FactorMode mode = FactorMode::eigen, double tol = kPsdTol);

/// An RKHS element on the sample span, sum_{i,a} c_{i*h+a} K~_{(s_i, e_a)}.
struct RkhsElement {
  CVector coefficients;

  /// The kernel section K~_{(s_i, a)}.
  static RkhsElement section(Index n, Index h, Index i, const CVector& a);
};

/// c^* G d.
Complex rkhs_inner(const RkhsElement& f, const RkhsElement& g, const BlockGram& gram);

/// <a, f(s_i)>_H, computed both as an inner product against a kernel section
/// and as a weighted sum of Gram blocks; the two must agree.
Complex reproducing_eval(const RkhsElement& f, Index i, const CVector& a, const BlockGram& gram);

struct Intertwiner {
  CMatrix unitary;            // r2 x r1, partial isometry mapping span(F1) onto span(F2)
  double intertwining_defect;  // max_i ||U V1(s_i) - V2(s_i)||_max
  double isometry_defect;      // ||U^* U - P_{span F1}||_max
};

/// Unitary equivalence of two factorizations of the same Gram (orthogonal
/// Procrustes on F2 F1^*).
Intertwiner compute_intertwiner(const FactorSystem& f1, const FactorSystem& f2);

}  // namespace opk
