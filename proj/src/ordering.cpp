#include "opkernel/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opkernel/errors.hpp"

namespace opk {

namespace {

void require_same_shape(const BlockGram& gk, const BlockGram& gl) {
  if (gk.n() != gl.n() || gk.h() != gl.h()) {
    throw DimensionError("kernel order: Grams must share points and h");
  }
}

void require_order(const BlockGram& gk, const BlockGram& gl, double tol) {
  const OrderVerdict v = check_order(gk, gl, tol);
  if (!v.holds) {
    throw PreconditionError("order_violated", "K <= L fails: min eigenvalue of G_L - G_K is " +
                                                  std::to_string(v.min_eigenvalue));
  }
}

}  // namespace

OrderVerdict check_order(const BlockGram& gk, const BlockGram& gl, double tol) {
  require_same_shape(gk, gl);
  const PsdVerdict v = psd_check(hermitize(gl.matrix() - gk.matrix()), tol);
  return {v.is_psd, v.min_eigenvalue};
}

RnOperator rn_operator(const BlockGram& gk, const BlockGram& gl, double tol) {
  require_same_shape(gk, gl);
  require_order(gk, gl, tol);
  return rn_operator(gk, factorize(gl, FactorMode::eigen, tol), tol);
}

RnOperator rn_operator(const BlockGram& gk, const FactorSystem& fl, double tol) {
  const BlockGram& gl = fl.source();
  require_same_shape(gk, gl);
  if (fl.mode() != FactorMode::eigen) {
    throw PreconditionError("eigen_mode_required", "rn_operator: L factor system must be eigen mode");
  }
  require_order(gk, gl, tol);

  const CMatrix& f = fl.stacked();  // r x nh, full row rank
  const Index r = f.rows();
  RnOperator out;
  if (r == 0) {
    out.t = hermitize(CMatrix::Zero(0, 0));
    out.range_projector = hermitize(CMatrix::Zero(gl.size(), gl.size()));
    out.residual = max_abs(gk.matrix());
    out.eigenvalues.resize(0);
  } else {
    // F^+ = F^* (F F^*)^{-1}; F F^* is the diagonal of retained eigenvalues.
    const CMatrix gram_small = f * f.adjoint();
    const CMatrix f_pinv = f.adjoint() * gram_small.ldlt().solve(CMatrix::Identity(r, r));
    out.range_projector = hermitize(f_pinv * f);
    out.t = hermitize(f_pinv.adjoint() * gk.matrix() * f_pinv);
    const CMatrix& p = out.range_projector.matrix();
    out.residual = max_abs(gk.matrix() - p * gk.matrix() * p);

    const SpectralDecomposition sd = spectral(out.t);
    out.eigenvalues = sd.eigenvalues;
    const double top = sd.eigenvalues(0);
    const double bottom = sd.eigenvalues(r - 1);
    if (top > 1.0 + kRnSpectrumTol || bottom < -kRnSpectrumTol) {
      throw PreconditionError("order_violated", "rn_operator: spectrum of T leaves [0, 1] (range [" +
                                                    std::to_string(bottom) + ", " + std::to_string(top) + "])");
    }
    if (top > 1.0 || bottom < 0.0) {
      const RVector clamped = sd.eigenvalues.cwiseMax(0.0).cwiseMin(1.0);
      out.t = hermitize(sd.eigenvectors * clamped.cast<Complex>().asDiagonal() * sd.eigenvectors.adjoint());
    }
  }
  if (out.residual > kRangeResidualTol * spectral_norm(gk.matrix())) {
    throw PreconditionError("range_incompatible",
                            "rn_operator: range(G_K) is not contained in range(G_L), residual " +
                                std::to_string(out.residual));
  }
  return out;
}

HOperator reconstruct_from_T(const FactorSystem& fl, const HermitianMatrix& t, Index i, Index j) {
  if (t.dim() != fl.r()) {
    throw DimensionError("reconstruct_from_T: T must act on the " + std::to_string(fl.r()) +
                         "-dimensional factor space");
  }
  const CMatrix vi = fl.factor(i);
  const CMatrix vj = fl.factor(j);
  const HOperator direct = vi.adjoint() * t.matrix() * vj;
  const CMatrix root = psd_sqrt(t).matrix();
  const HOperator via_root = (root * vi).adjoint() * (root * vj);
  if (max_abs(direct - via_root) > 1e-9 * (1.0 + spectral_norm(fl.source().matrix()))) {
    throw NumericalError("reconstruction_mismatch", "reconstruct_from_T: T and T^{1/2} paths disagree");
  }
  return direct;
}

HOperator reconstruct_from_T(const FactorSystem& fl, const RnOperator& t, Index i, Index j) {
  return reconstruct_from_T(fl, t.t, i, j);
}

AronszajnNorms aronszajn_norms(const RkhsElement& c, const BlockGram& gk, const BlockGram& gl, double tol) {
  require_same_shape(gk, gl);
  if (c.coefficients.size() != gk.size()) {
    throw DimensionError("aronszajn_norms: coefficient length must equal n*h");
  }
  require_order(gk, gl, tol);
  const CVector v = gk.matrix() * c.coefficients;
  const double sq_k = c.coefficients.dot(v).real();
  const PseudoInverse gl_pinv = pinv(gl.hermitian());
  const double sq_l = v.dot(gl_pinv.pseudo_inverse.matrix() * v).real();
  AronszajnNorms out{std::sqrt(std::max(sq_k, 0.0)), std::sqrt(std::max(sq_l, 0.0))};
  if (out.norm_l > out.norm_k + 1e-9) {
    throw NumericalError("contraction_violated", "aronszajn_norms: ||f||_L exceeds ||f||_K");
  }
  return out;
}

}  // namespace opk
