#pragma once

#include <cstdint>
#include <vector>

#include "opkernel/cp_map.hpp"
#include "opkernel/gaussian.hpp"
#include "opkernel/kernels.hpp"
#include "opkernel/ordering.hpp"
#include "opkernel/rkhs.hpp"

namespace opk {

/// Choi positivity.
PsdVerdict is_cp(const CpMap& psi, double tol = kPsdTol);

/// Kraus operators (h x d) from the Choi eigen-decomposition; one per
/// retained eigenvalue.
std::vector<CMatrix> kraus(const CpMap& psi, double rank_tol = kRankTol);

/// The matrix units E_ij of M_d, ordered by i*d + j.
std::vector<CMatrix> matrix_unit_basis(Index d);

/// K(A,B) = psi(A^* B) as a kernel over the matrix-unit basis.
OperatorKernelSpec cp_kernel_spec(const CpMap& psi);

/// Block Gram of psi(A^* B) over the matrix units; rejects non-CP maps.
BlockGram kernel_from_cp(const CpMap& psi, double tol = kPsdTol);

/// psi(A) = V^* pi(A) V with pi a *-representation of M_d on C^{dim_k}.
struct StinespringDilation {
  Index d = 0;
  Index dim_k = 0;
  CMatrix v;                  // dim_k x h
  std::vector<CMatrix> units;  // pi(E_ij) at index i*d + j
  bool minimal = false;

  /// Linear extension of pi from the matrix units.
  CMatrix pi(const CMatrix& a) const;
  const CMatrix& pi_unit(Index i, Index j) const;

  /// max over matrix units of ||psi(E_ij) - V^* pi(E_ij) V||_max.
  double exactness_defect(const CpMap& psi) const;
  /// max over unit pairs of ||pi(E_ij) pi(E_kl) - delta_jk pi(E_il)||_max,
  /// together with the adjoint defect ||pi(E_ij)^* - pi(E_ji)||_max.
  double multiplicativity_defect() const;
  /// dim span{ pi(A) V h }.
  Index cyclic_span_dimension() const;
};

/// Minimal dilation built on the RKHS of the CP-induced kernel: the dilation
/// space is the eigen factor space of kernel_from_cp(psi), V h is the section
/// at (I, h), and pi(A) maps the section at (B, h) to the one at (AB, h).
StinespringDilation stinespring(const CpMap& psi, double tol = kPsdTol);

/// Same construction against an existing eigen-mode factor system of
/// kernel_from_cp(psi).
StinespringDilation stinespring(const CpMap& psi, const FactorSystem& f);

/// The Kraus dilation C^d (x) C^R with pi(A) = A (x) I_R; minimal only when the
/// Kraus operators are linearly independent.
StinespringDilation kraus_dilation(const CpMap& psi, double rank_tol = kRankTol);

struct CpOrderVerdict {
  bool holds = false;
  double min_eigenvalue = 0.0;  // of Choi(psi) - Choi(phi)
  bool kernel_order_holds = false;
  double kernel_min_eigenvalue = 0.0;
};

/// psi - phi is CP. Checked on the Choi matrices and, independently, as the
/// kernel order of the induced Grams; the two verdicts must agree.
CpOrderVerdict cp_order(const CpMap& phi, const CpMap& psi, double tol = kPsdTol);

/// Radon-Nikodym derivative of phi with respect to psi, in the commutant of
/// the minimal dilation of psi.
struct RnCommutantOperator {
  HermitianMatrix t;
  double commutator_defect = 0.0;
  /// max over units of ||phi(E_ij) - V^* T^{1/2} pi(E_ij) T^{1/2} V||_max.
  double sandwich_defect = 0.0;
  /// max over units of ||phi(E_ij) - V^* T pi(E_ij) V||_max.
  double direct_defect = 0.0;
  StinespringDilation dilation;
};

inline constexpr double kCommutantTol = 1e-9;

RnCommutantOperator cp_rn(const CpMap& phi, const CpMap& psi, double tol = kPsdTol);

/// phi(A) = V^* T^{1/2} pi(A) T^{1/2} V.
CMatrix rn_sandwich(const StinespringDilation& dil, const HermitianMatrix& t, const CMatrix& a);

/// Gaussian process over the matrix-unit basis whose covariance is psi(A^* B).
GaussianDraw gp_decompose(const CpMap& psi, Index n_draws, std::uint64_t seed, double tol = kPsdTol);

}  // namespace opk
