#include "opkernel/kernels.hpp"

#include <cmath>
#include <string>

#include "opkernel/errors.hpp"

namespace opk {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Index point_index(const SamplePoint& p, Index count) {
  if (p.coordinates.size() != 1) {
    throw DimensionError("index-addressed kernel expects one coordinate per point");
  }
  const double x = p.coordinates(0);
  if (!(x >= 0.0) || x != std::floor(x) || x >= static_cast<double>(count)) {
    throw DimensionError("unknown point index " + std::to_string(x) + " (kernel has " +
                         std::to_string(count) + " registered points)");
  }
  return static_cast<Index>(x);
}

void require_finite(const SamplePoint& p) {
  if (!p.coordinates.allFinite()) throw DimensionError("sample point has non-finite coordinates");
}

}  // namespace

SamplePoint SamplePoint::scalar(double x) {
  SamplePoint p;
  p.coordinates = RVector::Constant(1, x);
  return p;
}

SamplePoint SamplePoint::index(Index i) { return scalar(static_cast<double>(i)); }

ScalarKernelSpec ScalarKernelSpec::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw DimensionError("gaussian kernel width must be positive");
  ScalarKernelSpec k;
  k.family = Family::gaussian;
  k.width = sigma;
  return k;
}

ScalarKernelSpec ScalarKernelSpec::laplacian(double gamma) {
  if (!(gamma > 0.0)) throw DimensionError("laplacian kernel scale must be positive");
  ScalarKernelSpec k;
  k.family = Family::laplacian;
  k.scale = gamma;
  return k;
}

ScalarKernelSpec ScalarKernelSpec::polynomial(int degree, double offset) {
  if (degree < 1) throw DimensionError("polynomial kernel degree must be >= 1");
  if (!(offset >= 0.0)) throw DimensionError("polynomial kernel offset must be >= 0");
  ScalarKernelSpec k;
  k.family = Family::polynomial;
  k.degree = degree;
  k.offset = offset;
  return k;
}

ScalarKernelSpec ScalarKernelSpec::linear() {
  ScalarKernelSpec k;
  k.family = Family::linear;
  return k;
}

double ScalarKernelSpec::operator()(const RVector& s, const RVector& t) const {
  if (s.size() != t.size()) throw DimensionError("scalar kernel: coordinate dimensions differ");
  switch (family) {
    case Family::gaussian:
      return std::exp(-(s - t).squaredNorm() / (2.0 * width * width));
    case Family::laplacian:
      return std::exp(-scale * (s - t).norm());
    case Family::polynomial:
      return std::pow(s.dot(t) + offset, degree);
    case Family::linear:
      return s.dot(t);
  }
  return 0.0;
}

OperatorKernelSpec OperatorKernelSpec::separable(Index h, std::vector<SeparableKernel::Term> terms) {
  if (h < 1) throw DimensionError("separable kernel: h must be positive");
  for (const auto& term : terms) {
    if (term.coefficient.rows() != h || term.coefficient.cols() != h) {
      throw DimensionError("separable kernel: coefficient operators must be h x h");
    }
  }
  OperatorKernelSpec spec;
  spec.h_ = h;
  spec.v_ = SeparableKernel{std::move(terms)};
  return spec;
}

OperatorKernelSpec OperatorKernelSpec::explicit_factor(std::vector<CMatrix> factors) {
  if (factors.empty()) throw DimensionError("explicit factor kernel needs at least one point");
  const Index r = factors.front().rows();
  const Index h = factors.front().cols();
  if (h < 1) throw DimensionError("explicit factor kernel: h must be positive");
  for (const auto& a : factors) {
    if (a.rows() != r || a.cols() != h) {
      throw DimensionError("explicit factor kernel: all factors must share one r x h shape");
    }
  }
  OperatorKernelSpec spec;
  spec.h_ = h;
  spec.v_ = ExplicitFactorKernel{std::move(factors)};
  return spec;
}

OperatorKernelSpec OperatorKernelSpec::cp_induced(CpMap map, std::vector<CMatrix> elements) {
  for (const auto& a : elements) {
    if (a.rows() != map.d() || a.cols() != map.d()) {
      throw DimensionError("cp-induced kernel: elements must be d x d");
    }
  }
  OperatorKernelSpec spec;
  spec.h_ = map.h();
  spec.v_ = CpInducedKernel{std::move(map), std::move(elements)};
  return spec;
}

Index OperatorKernelSpec::registered_points() const noexcept {
  return std::visit(Overloaded{
                        [](const SeparableKernel&) -> Index { return 0; },
                        [](const ExplicitFactorKernel& k) -> Index {
                          return static_cast<Index>(k.factors.size());
                        },
                        [](const CpInducedKernel& k) -> Index {
                          return static_cast<Index>(k.elements.size());
                        },
                    },
                    v_);
}

BlockGram::BlockGram(Index n, Index h, HermitianMatrix matrix)
    : n_(n), h_(h), m_(std::move(matrix)) {
  if (n < 0 || h < 1 || m_.dim() != n * h) {
    throw DimensionError("BlockGram: matrix dimension must equal n*h");
  }
}

HOperator BlockGram::block(Index i, Index j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw DimensionError("BlockGram: block index out of range");
  return m_.matrix().block(i * h_, j * h_, h_, h_);
}

BlockGram BlockGram::scaled(double factor) const {
  return BlockGram(n_, h_, hermitize(m_.matrix() * factor));
}

HOperator eval_kernel(const OperatorKernelSpec& spec, const SamplePoint& s, const SamplePoint& t) {
  const Index h = spec.h();
  return std::visit(
      Overloaded{
          [&](const SeparableKernel& k) -> HOperator {
            require_finite(s);
            require_finite(t);
            if (s.coordinates.size() != t.coordinates.size() || s.coordinates.size() == 0) {
              throw DimensionError("eval_kernel: points have different coordinate dimensions");
            }
            HOperator out = HOperator::Zero(h, h);
            for (const auto& term : k.terms) out += term.scalar(s.coordinates, t.coordinates) * term.coefficient;
            return out;
          },
          [&](const ExplicitFactorKernel& k) -> HOperator {
            const Index count = static_cast<Index>(k.factors.size());
            const Index i = point_index(s, count);
            const Index j = point_index(t, count);
            return k.factors[static_cast<std::size_t>(i)].adjoint() * k.factors[static_cast<std::size_t>(j)];
          },
          [&](const CpInducedKernel& k) -> HOperator {
            const Index count = static_cast<Index>(k.elements.size());
            const Index i = point_index(s, count);
            const Index j = point_index(t, count);
            return opk::apply(k.map, k.elements[static_cast<std::size_t>(i)].adjoint() *
                                    k.elements[static_cast<std::size_t>(j)]);
          },
      },
      spec.variant());
}

Complex flatten(const OperatorKernelSpec& spec, const SamplePoint& s, const CVector& a,
                const SamplePoint& t, const CVector& b) {
  if (a.size() != spec.h() || b.size() != spec.h()) {
    throw DimensionError("flatten: vectors must have dimension h");
  }
  return a.dot(eval_kernel(spec, s, t) * b);  // Eigen's dot conjugates the left operand
}

void validate_density(const CMatrix& rho, double tol) {
  if (rho.rows() != rho.cols()) throw DimensionError("density operator must be square");
  const HermitianMatrix hr = hermitize(rho);
  if (hr.defect() > tol * (1.0 + max_abs(rho))) {
    throw PreconditionError("invalid_density", "density operator is not Hermitian");
  }
  const PsdVerdict v = psd_check(hr, tol);
  if (!v.is_psd) throw PreconditionError("invalid_density", "density operator is not PSD");
  const Complex tr = rho.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol) {
    throw PreconditionError("invalid_density", "density operator trace is " + std::to_string(tr.real()) +
                                                   ", expected 1");
  }
}

Complex trace_kernel(const OperatorKernelSpec& spec, const CMatrix& rho, const SamplePoint& s,
                     const SamplePoint& t) {
  if (rho.rows() != spec.h() || rho.cols() != spec.h()) {
    throw DimensionError("trace_kernel: rho must be h x h");
  }
  validate_density(rho);
  return (rho * eval_kernel(spec, s, t)).trace();
}

BlockGram assemble_block_gram(const OperatorKernelSpec& spec, const std::vector<SamplePoint>& points) {
  if (points.empty()) throw DimensionError("assemble_block_gram: empty point list");
  const Index n = static_cast<Index>(points.size());
  const Index h = spec.h();
  CMatrix g(n * h, n * h);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      g.block(i * h, j * h, h, h) =
          eval_kernel(spec, points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
    }
  }
  return BlockGram(n, h, hermitize(g));
}

PsdVerdict check_pd(const BlockGram& gram, double tol) { return psd_check(gram.hermitian(), tol); }

CMatrix trace_blocks(const BlockGram& gram, const CMatrix& x) {
  const Index n = gram.n();
  const Index h = gram.h();
  if (x.rows() != h || x.cols() != h) throw DimensionError("trace_blocks: operator must be h x h");
  CMatrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      out(i, j) = (x * gram.matrix().block(i * h, j * h, h, h)).trace();
    }
  }
  return out;
}

}  // namespace opk
