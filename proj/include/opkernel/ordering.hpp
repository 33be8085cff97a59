#pragma once

#include "opkernel/rkhs.hpp"

namespace opk {

/// K <= L on the sample set: G_L - G_K is PSD.
struct OrderVerdict {
  bool holds = false;
  double min_eigenvalue = 0.0;  // of G_L - G_K
};

OrderVerdict check_order(const BlockGram& gk, const BlockGram& gl, double tol = kPsdTol);

/// Radon-Nikodym operator T = dK/dL with 0 <= T <= I and K = V_L^* T V_L.
///
/// T acts on the ambient space C^{r_L} of the eigen-mode factor system of
/// G_L, i.e. in the eigen-basis of the minimal space of L. `range_projector`
/// is the projector onto range(G_L) in sample coordinates (nh x nh).
struct RnOperator {
  HermitianMatrix t;
  HermitianMatrix range_projector;
  /// ||G_K - P G_K P||_max.
  double residual = 0.0;
  /// Eigenvalues of T before clamping to [0, 1], descending.
  RVector eigenvalues;
};

/// Eigenvalues of T may leave [0, 1] by this much before the order is
/// considered violated.
inline constexpr double kRnSpectrumTol = 1e-8;
/// Range defects above this multiple of ||G_K||_2 are reported as errors.
inline constexpr double kRangeResidualTol = 1e-8;

RnOperator rn_operator(const BlockGram& gk, const BlockGram& gl, double tol = kPsdTol);

/// Same, against an existing eigen-mode factor system of G_L.
RnOperator rn_operator(const BlockGram& gk, const FactorSystem& fl, double tol = kPsdTol);

/// V_L(s_i)^* T V_L(s_j); cross-checked against (T^{1/2}V_L(s_i))^*(T^{1/2}V_L(s_j)).
HOperator reconstruct_from_T(const FactorSystem& fl, const HermitianMatrix& t, Index i, Index j);
HOperator reconstruct_from_T(const FactorSystem& fl, const RnOperator& t, Index i, Index j);

struct AronszajnNorms {
  double norm_k = 0.0;
  double norm_l = 0.0;
};

/// Norms of f = sum c K~-sections of K in H_K and in H_L. Contractive
/// containment guarantees norm_l <= norm_k.
AronszajnNorms aronszajn_norms(const RkhsElement& c, const BlockGram& gk, const BlockGram& gl,
                               double tol = kPsdTol);

}  // namespace opk
