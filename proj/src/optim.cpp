#include "opkernel/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opkernel/errors.hpp"

namespace opk {

namespace {

void require_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw PreconditionError("invalid_beta", "beta must be positive and finite");
  }
}

double inner_objective(const CMatrix& g, const CVector& c, double beta) {
  const Index n = g.rows();
  Eigen::LLT<CMatrix> llt(g + beta * CMatrix::Identity(n, n));
  if (llt.info() != Eigen::Success) {
    throw PreconditionError("kernel_not_pd", "G_rho + beta I is not positive definite");
  }
  return beta * c.dot(llt.solve(c)).real();
}

// Exact line search of a convex function on [0, 1]. Golden-section search,
// then the best of {0, interior, 1} so the objective never increases.
template <class F>
std::pair<double, double> line_search(F&& objective, double at_zero) {
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = 0.0;
  double hi = 1.0;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  for (int it = 0; it < 90 && hi - lo > 1e-13; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = objective(x2);
    }
  }
  std::pair<double, double> best{0.0, at_zero};
  const double at_one = objective(1.0);
  if (at_one < best.second) best = {1.0, at_one};
  if (f1 < best.second) best = {x1, f1};
  if (f2 < best.second) best = {x2, f2};
  return best;
}

}  // namespace

DensityOperator DensityOperator::from_matrix(const CMatrix& rho) {
  validate_density(rho);
  DensityOperator out;
  out.rho_ = hermitize(rho);
  return out;
}

DensityOperator DensityOperator::maximally_mixed(Index h) {
  if (h < 1) throw DimensionError("density operator dimension must be positive");
  return from_matrix(CMatrix::Identity(h, h) / static_cast<double>(h));
}

HermitianMatrix gram_rho(const BlockGram& gram, const DensityOperator& rho) {
  if (rho.dim() != gram.h()) throw DimensionError("gram_rho: rho must be h x h");
  return hermitize(trace_blocks(gram, rho.matrix()));
}

HermitianMatrix gram_rho(const OperatorKernelSpec& kernel, const std::vector<SamplePoint>& points,
                         const DensityOperator& rho) {
  return gram_rho(assemble_block_gram(kernel, points), rho);
}

KrrSolution krr_solve(const HermitianMatrix& g, const CVector& c, double beta) {
  require_beta(beta);
  if (c.size() != g.dim()) throw DimensionError("krr_solve: data length must equal the Gram dimension");
  const Index n = g.dim();
  Eigen::LLT<CMatrix> llt(g.matrix() + beta * CMatrix::Identity(n, n));
  if (llt.info() != Eigen::Success) {
    throw PreconditionError("kernel_not_pd", "krr_solve: G + beta I is not positive definite");
  }
  KrrSolution out;
  out.alpha = llt.solve(c);
  out.objective = beta * c.dot(out.alpha).real();
  return out;
}

HermitianMatrix objective_grad_rho(const BlockGram& gram, const CVector& alpha, double beta) {
  if (alpha.size() != gram.n()) throw DimensionError("objective_grad_rho: alpha length must equal n");
  const Index n = gram.n();
  const Index h = gram.h();
  CMatrix m = CMatrix::Zero(h, h);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      m += std::conj(alpha(i)) * alpha(j) * gram.matrix().block(i * h, j * h, h, h);
    }
  }
  return hermitize(-beta * m);
}

HermitianMatrix objective_grad_rho(const OperatorKernelSpec& kernel, const std::vector<SamplePoint>& points,
                                   const CVector& alpha, double beta) {
  return objective_grad_rho(assemble_block_gram(kernel, points), alpha, beta);
}

RegressionModel optimize_rho(const OperatorKernelSpec& kernel, const std::vector<SamplePoint>& points,
                             const CVector& c, double beta, Index max_iters, double conv_tol) {
  require_beta(beta);
  if (max_iters < 1) throw PreconditionError("invalid_max_iters", "optimize_rho: max_iters must be >= 1");
  if (c.size() != static_cast<Index>(points.size())) {
    throw DimensionError("optimize_rho: one data value per point is required");
  }
  const BlockGram gram = assemble_block_gram(kernel, points);
  const PsdVerdict pd = check_pd(gram);
  if (!pd.is_psd) {
    throw PreconditionError("kernel_not_pd", "optimize_rho: kernel Gram is not PSD (min eigenvalue " +
                                                 std::to_string(pd.min_eigenvalue) + ")");
  }
  const Index h = gram.h();

  RegressionModel model;
  model.beta = beta;
  model.points = points;
  model.kernel = kernel;

  CMatrix rho = CMatrix::Identity(h, h) / static_cast<double>(h);
  for (Index iter = 1;; ++iter) {
    const DensityOperator current = DensityOperator::from_matrix(rho);
    const HermitianMatrix g = gram_rho(gram, current);
    if (!psd_check(g).is_psd) throw PreconditionError("kernel_not_pd", "optimize_rho: G_rho lost positivity");
    const KrrSolution inner = krr_solve(g, c, beta);
    const HermitianMatrix grad = objective_grad_rho(gram, inner.alpha, beta);
    const SpectralDecomposition sd = spectral(grad);
    const CVector v = sd.eigenvectors.col(h - 1);
    const double gap = std::max(0.0, (rho * grad.matrix()).trace().real() - sd.eigenvalues(h - 1));

    model.objective_trace.push_back(inner.objective);
    model.gap_trace.push_back(gap);
    model.alpha = inner.alpha;
    model.rho = current;
    model.iterations = iter;
    if (gap < conv_tol) {
      model.converged = true;
      break;
    }
    if (iter >= max_iters) break;

    const CMatrix vertex = v * v.adjoint();
    const CMatrix g_vertex = trace_blocks(gram, vertex);
    const CMatrix& g_now = g.matrix();
    const auto slice = [&](double gamma) {
      return inner_objective((1.0 - gamma) * g_now + gamma * g_vertex, c, beta);
    };
    const auto [step, value] = line_search(slice, inner.objective);
    // Stop once the line search cannot beat roundoff in J.
    if (step == 0.0 || value >= inner.objective - 1e-14 * std::abs(inner.objective)) break;
    CMatrix next = (1.0 - step) * rho + step * vertex;
    next = hermitize(next).matrix();
    next /= next.trace().real();
    rho = next;
  }
  return model;
}

Complex predict(const RegressionModel& model, const SamplePoint& s) {
  Complex out(0.0, 0.0);
  for (std::size_t j = 0; j < model.points.size(); ++j) {
    out += model.alpha(static_cast<Index>(j)) * trace_kernel(model.kernel, model.rho.matrix(), s, model.points[j]);
  }
  return out;
}

}  // namespace opk
