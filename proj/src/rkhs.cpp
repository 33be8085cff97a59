#include "opkernel/rkhs.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "opkernel/errors.hpp"

namespace opk {

namespace {

constexpr double kReconstructionTol = 1e-10;
constexpr double kSameGramTol = 1e-9;

CMatrix eigen_factor(const BlockGram& gram) {
  const SpectralDecomposition sd = spectral(gram.hermitian());
  const Index r = sd.rank();
  const RVector roots = sd.eigenvalues.head(r).cwiseSqrt();
  return roots.cast<Complex>().asDiagonal() * sd.eigenvectors.leftCols(r).adjoint();
}

CMatrix cholesky_factor(const BlockGram& gram) {
  // Diagonally pivoted outer-product Cholesky: G(piv, piv) = L L^*, so column piv[c] of F is row c of L^*.
  // Eigen's LDLT reports failure on singular PSD input with round-off negative pivots, hence the hand-rolled loop.
  const Index size = gram.size();
  CMatrix work = gram.matrix();
  CMatrix lower = CMatrix::Zero(size, size);
  std::vector<Index> piv(static_cast<std::size_t>(size));
  for (Index i = 0; i < size; ++i) piv[static_cast<std::size_t>(i)] = i;
  const double floor = 1e-14 * std::max(1.0, work.diagonal().real().maxCoeff());
  for (Index k = 0; k < size; ++k) {
    Index best = k;
    for (Index j = k + 1; j < size; ++j) {
      if (work(j, j).real() > work(best, best).real()) best = j;
    }
    if (work(best, best).real() <= floor) break;
    if (best != k) {
      work.row(k).swap(work.row(best));
      work.col(k).swap(work.col(best));
      lower.row(k).swap(lower.row(best));
      std::swap(piv[static_cast<std::size_t>(k)], piv[static_cast<std::size_t>(best)]);
    }
    const double pivot = std::sqrt(work(k, k).real());
    lower(k, k) = pivot;
    const Index rest = size - k - 1;
    if (rest == 0) break;
    lower.col(k).tail(rest) = work.col(k).tail(rest) / pivot;
    work.bottomRightCorner(rest, rest).noalias() -= lower.col(k).tail(rest) * lower.col(k).tail(rest).adjoint();
  }
  const CMatrix upper = lower.adjoint();
  CMatrix f(size, size);
  for (Index c = 0; c < size; ++c) f.col(piv[static_cast<std::size_t>(c)]) = upper.col(c);
  return f;
}

}  // namespace

FactorSystem::FactorSystem(CMatrix stacked, std::shared_ptr<const BlockGram> source, FactorMode mode)
    : stacked_(std::move(stacked)), source_(std::move(source)), mode_(mode) {
  if (!source_ || stacked_.cols() != source_->size()) {
    throw DimensionError("FactorSystem: stacked factor must have n*h columns");
  }
}

CMatrix FactorSystem::factor(Index i) const {
  if (i < 0 || i >= n()) throw DimensionError("FactorSystem: point index out of range");
  return stacked_.middleCols(i * h(), h());
}

double FactorSystem::reconstruction_error() const {
  if (source_->size() == 0) return 0.0;
  return max_abs(stacked_.adjoint() * stacked_ - source_->matrix());
}

FactorSystem factorize(const BlockGram& gram, FactorMode mode, double tol) {
  const PsdVerdict verdict = check_pd(gram, tol);
  if (!verdict.is_psd) {
    throw PreconditionError("not_psd", "factorize: Gram matrix is not PSD (min eigenvalue " +
                                           std::to_string(verdict.min_eigenvalue) + ")");
  }
  auto source = std::make_shared<const BlockGram>(gram);
  CMatrix stacked = mode == FactorMode::eigen ? eigen_factor(gram) : cholesky_factor(gram);
  FactorSystem out(std::move(stacked), std::move(source), mode);
  const double bound = kReconstructionTol * (1.0 + spectral_norm(gram.matrix()));
  const double err = out.reconstruction_error();
  if (err > bound) {
    throw NumericalError("factorization_inexact",
                         "factorize: reconstruction error " + std::to_string(err) + " exceeds bound");
  }
  return out;
}

RkhsElement RkhsElement::section(Index n, Index h, Index i, const CVector& a) {
  if (i < 0 || i >= n) throw DimensionError("RkhsElement::section: point index out of range");
  if (a.size() != h) throw DimensionError("RkhsElement::section: vector must have dimension h");
  RkhsElement f;
  f.coefficients = CVector::Zero(n * h);
  f.coefficients.segment(i * h, h) = a;
  return f;
}

Complex rkhs_inner(const RkhsElement& f, const RkhsElement& g, const BlockGram& gram) {
  if (f.coefficients.size() != gram.size() || g.coefficients.size() != gram.size()) {
    throw DimensionError("rkhs_inner: coefficient length must equal n*h");
  }
  return f.coefficients.dot(gram.matrix() * g.coefficients);
}

Complex reproducing_eval(const RkhsElement& f, Index i, const CVector& a, const BlockGram& gram) {
  const Index n = gram.n();
  const Index h = gram.h();
  if (i < 0 || i >= n) throw DimensionError("reproducing_eval: point index out of range");
  if (a.size() != h) throw DimensionError("reproducing_eval: vector must have dimension h");
  if (f.coefficients.size() != gram.size()) {
    throw DimensionError("reproducing_eval: coefficient length must equal n*h");
  }
  const Complex via_inner = rkhs_inner(RkhsElement::section(n, h, i, a), f, gram);

  CVector value = CVector::Zero(h);  // f(s_i) as an H-vector
  for (Index j = 0; j < n; ++j) value += gram.block(i, j) * f.coefficients.segment(j * h, h);
  const Complex via_blocks = a.dot(value);

  const double scale = a.lpNorm<1>() * max_abs(gram.matrix()) * f.coefficients.lpNorm<1>();
  if (std::abs(via_inner - via_blocks) > 1e-12 * (1.0 + scale)) {
    throw NumericalError("reproducing_property", "reproducing_eval: evaluation paths disagree");
  }
  return via_inner;
}

Intertwiner compute_intertwiner(const FactorSystem& f1, const FactorSystem& f2) {
  if (f1.stacked().cols() != f2.stacked().cols()) {
    throw DimensionError("compute_intertwiner: factor systems cover different sample sets");
  }
  const CMatrix g1 = f1.stacked().adjoint() * f1.stacked();
  const CMatrix g2 = f2.stacked().adjoint() * f2.stacked();
  const double scale = 1.0 + std::max(spectral_norm(g1), spectral_norm(g2));
  if (max_abs(g1 - g2) > kSameGramTol * scale) {
    throw PreconditionError("different_grams", "compute_intertwiner: factor systems reconstruct different Grams");
  }

  const Index r1 = f1.r();
  const Index r2 = f2.r();
  Intertwiner out;
  out.unitary = CMatrix::Zero(r2, r1);
  CMatrix span_projector = CMatrix::Zero(r1, r1);
  if (r1 > 0 && r2 > 0) {
    const CMatrix cross = f2.stacked() * f1.stacked().adjoint();
    Eigen::JacobiSVD<CMatrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RVector& s = svd.singularValues();
    const double cutoff = kRankTol * (s.size() > 0 ? s(0) : 0.0);
    Index k = 0;
    while (k < s.size() && s(k) > cutoff) ++k;
    out.unitary = svd.matrixU().leftCols(k) * svd.matrixV().leftCols(k).adjoint();
    span_projector = svd.matrixV().leftCols(k) * svd.matrixV().leftCols(k).adjoint();
  }
  out.intertwining_defect = max_abs(out.unitary * f1.stacked() - f2.stacked());
  out.isometry_defect = max_abs(out.unitary.adjoint() * out.unitary - span_projector);
  return out;
}

}  // namespace opk
