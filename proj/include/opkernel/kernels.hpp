#pragma once

#include <variant>
#include <vector>

#include "opkernel/cp_map.hpp"
#include "opkernel/numerics.hpp"

namespace opk {

/// A point of the sample set S. Index-addressed kernels (explicit factors,
/// CP-induced) read the single coordinate as an integer index.
struct SamplePoint {
  RVector coordinates;

  static SamplePoint scalar(double x);
  static SamplePoint index(Index i);
};

/// Scalar positive-definite kernel on R^m.
struct ScalarKernelSpec {
  enum class Family { gaussian, laplacian, polynomial, linear };

  Family family = Family::gaussian;
  double width = 1.0;   // gaussian sigma
  double scale = 1.0;   // laplacian gamma
  int degree = 1;       // polynomial p
  double offset = 0.0;  // polynomial c

  static ScalarKernelSpec gaussian(double sigma);
  static ScalarKernelSpec laplacian(double gamma);
  static ScalarKernelSpec polynomial(int degree, double offset);
  static ScalarKernelSpec linear();

  double operator()(const RVector& s, const RVector& t) const;
};

/// K(s,t) = sum_m k_m(s,t) B_m.
struct SeparableKernel {
  struct Term {
    ScalarKernelSpec scalar;
    CMatrix coefficient;
  };
  std::vector<Term> terms;
};

/// K(s_i,s_j) = A(s_i)^* A(s_j), defined only on registered indices.
struct ExplicitFactorKernel {
  std::vector<CMatrix> factors;  // each r x h
};

/// K(A,B) = psi(A^* B) on a list of d x d algebra elements.
struct CpInducedKernel {
  CpMap map;
  std::vector<CMatrix> elements;
};

/// Declarative description of an operator-valued kernel K: S x S -> L(H).
class OperatorKernelSpec {
 public:
  using Variant = std::variant<SeparableKernel, ExplicitFactorKernel, CpInducedKernel>;

  OperatorKernelSpec() = default;

  /// Shapes are validated; positivity is not (it is what check_pd decides).
  static OperatorKernelSpec separable(Index h, std::vector<SeparableKernel::Term> terms);
  static OperatorKernelSpec explicit_factor(std::vector<CMatrix> factors);
  static OperatorKernelSpec cp_induced(CpMap map, std::vector<CMatrix> elements);

  Index h() const noexcept { return h_; }
  const Variant& variant() const noexcept { return v_; }
  bool index_addressed() const noexcept { return !std::holds_alternative<SeparableKernel>(v_); }
  /// Number of registered points for index-addressed kernels, 0 otherwise.
  Index registered_points() const noexcept;

 private:
  Index h_ = 0;
  Variant v_;
};

/// Operator-valued kernel restricted to n sample points, as an nh x nh matrix
/// whose (i,j) block is K(s_i,s_j). Row (i,a) lives at index i*h + a.
class BlockGram {
 public:
  BlockGram() = default;
  BlockGram(Index n, Index h, HermitianMatrix matrix);

  Index n() const noexcept { return n_; }
  Index h() const noexcept { return h_; }
  Index size() const noexcept { return n_ * h_; }
  const HermitianMatrix& hermitian() const noexcept { return m_; }
  const CMatrix& matrix() const noexcept { return m_.matrix(); }
  Index index(Index i, Index a) const noexcept { return i * h_ + a; }
  HOperator block(Index i, Index j) const;

  BlockGram scaled(double factor) const;

 private:
  Index n_ = 0;
  Index h_ = 0;
  HermitianMatrix m_;
};

HOperator eval_kernel(const OperatorKernelSpec& spec, const SamplePoint& s, const SamplePoint& t);

/// <a, K(s,t) b>, conjugate-linear in a.
Complex flatten(const OperatorKernelSpec& spec, const SamplePoint& s, const CVector& a,
                const SamplePoint& t, const CVector& b);

/// Throws PreconditionError("invalid_density") unless rho is PSD with unit trace.
void validate_density(const CMatrix& rho, double tol = kPsdTol);

/// Trace(rho K(s,t)).
Complex trace_kernel(const OperatorKernelSpec& spec, const CMatrix& rho, const SamplePoint& s,
                     const SamplePoint& t);

BlockGram assemble_block_gram(const OperatorKernelSpec& spec, const std::vector<SamplePoint>& points);

PsdVerdict check_pd(const BlockGram& gram, double tol = kPsdTol);

/// n x n matrix with entries Trace(X * block(i,j)). X need not be a density.
CMatrix trace_blocks(const BlockGram& gram, const CMatrix& x);

}  // namespace opk
