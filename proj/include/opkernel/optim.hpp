#pragma once

#include <vector>

#include "opkernel/kernels.hpp"

namespace opk {

/// PSD operator with unit trace.
class DensityOperator {
 public:
  DensityOperator() = default;

  /// Validates PSD and Trace = 1 within 1e-10.
  static DensityOperator from_matrix(const CMatrix& rho);
  /// I / h.
  static DensityOperator maximally_mixed(Index h);

  const HermitianMatrix& hermitian() const noexcept { return rho_; }
  const CMatrix& matrix() const noexcept { return rho_.matrix(); }
  Index dim() const noexcept { return rho_.dim(); }

 private:
  HermitianMatrix rho_;
};

/// Fitted model f = sum_j alpha_j K_rho(., s_j).
struct RegressionModel {
  CVector alpha;
  DensityOperator rho;
  double beta = 0.0;
  std::vector<SamplePoint> points;
  OperatorKernelSpec kernel;
  /// J(rho_k) for each iterate, non-increasing.
  std::vector<double> objective_trace;
  /// Frank-Wolfe gap at each iterate.
  std::vector<double> gap_trace;
  Index iterations = 0;
  bool converged = false;

  double fw_gap() const { return gap_trace.empty() ? 0.0 : gap_trace.back(); }
};

/// (G_rho)_ij = Trace(rho K(s_i, s_j)).
HermitianMatrix gram_rho(const OperatorKernelSpec& kernel, const std::vector<SamplePoint>& points,
                         const DensityOperator& rho);
HermitianMatrix gram_rho(const BlockGram& gram, const DensityOperator& rho);

struct KrrSolution {
  CVector alpha;
  /// beta c^* (G + beta I)^{-1} c, the minimized inner objective.
  double objective = 0.0;
};

/// alpha = (G + beta I)^{-1} c.
KrrSolution krr_solve(const HermitianMatrix& g, const CVector& c, double beta);

/// M = -beta sum_ij conj(alpha_i) alpha_j K(s_i, s_j), the gradient of
/// J(rho) = beta c^* (G_rho + beta I)^{-1} c in the trace pairing.
HermitianMatrix objective_grad_rho(const OperatorKernelSpec& kernel, const std::vector<SamplePoint>& points,
                                   const CVector& alpha, double beta);
HermitianMatrix objective_grad_rho(const BlockGram& gram, const CVector& alpha, double beta);

/// Jointly minimizes sum_i |f(s_i) - c_i|^2 + beta ||f||^2 over f in the
/// RKHS of K_rho and density operators rho.
///
/// Frank-Wolfe on the density set starting at I/h. Iterate k evaluates J and
/// the gap Trace((rho - vv^*) M), v the bottom eigenvector of M. It stops at
/// iterate k when the gap falls below conv_tol or k == max_iters; otherwise
/// it moves to the exact line-search minimizer on [rho, vv^*].
RegressionModel optimize_rho(const OperatorKernelSpec& kernel, const std::vector<SamplePoint>& points,
                             const CVector& c, double beta, Index max_iters, double conv_tol);

/// f(s) = sum_j alpha_j Trace(rho K(s, s_j)).
Complex predict(const RegressionModel& model, const SamplePoint& s);

}  // namespace opk
