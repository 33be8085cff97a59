#include "opkernel/cpmaps.hpp"

#include <algorithm>
#include <string>

#include "opkernel/errors.hpp"

namespace opk {

namespace {

constexpr double kSpanRankTol = 1e-9;
constexpr double kDualFormulaTol = 1e-9;

void require_cp(const CpMap& psi, double tol, const char* where) {
  const PsdVerdict v = is_cp(psi, tol);
  if (!v.is_psd) {
    throw PreconditionError("not_cp", std::string(where) + ": map is not completely positive (Choi min eigenvalue " +
                                          std::to_string(v.min_eigenvalue) + ")");
  }
}

std::vector<SamplePoint> unit_points(Index d) {
  std::vector<SamplePoint> points;
  points.reserve(static_cast<std::size_t>(d * d));
  for (Index p = 0; p < d * d; ++p) points.push_back(SamplePoint::index(p));
  return points;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

}  // namespace

PsdVerdict is_cp(const CpMap& psi, double tol) { return psd_check(psi.choi(), tol); }

std::vector<CMatrix> kraus(const CpMap& psi, double rank_tol) {
  require_cp(psi, kPsdTol, "kraus");
  const Index d = psi.d();
  const Index h = psi.h();
  const SpectralDecomposition sd = spectral(psi.choi(), rank_tol);
  std::vector<CMatrix> ops;
  for (Index k = 0; k < sd.rank(); ++k) {
    const double root = std::sqrt(sd.eigenvalues(k));
    CMatrix v(h, d);
    for (Index i = 0; i < d; ++i) v.col(i) = root * sd.eigenvectors.col(k).segment(i * h, h);
    ops.push_back(std::move(v));
  }
  return ops;
}

std::vector<CMatrix> matrix_unit_basis(Index d) {
  std::vector<CMatrix> units;
  units.reserve(static_cast<std::size_t>(d * d));
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) units.push_back(matrix_unit(d, i, j));
  }
  return units;
}

OperatorKernelSpec cp_kernel_spec(const CpMap& psi) {
  return OperatorKernelSpec::cp_induced(psi, matrix_unit_basis(psi.d()));
}

BlockGram kernel_from_cp(const CpMap& psi, double tol) {
  require_cp(psi, tol, "kernel_from_cp");
  return assemble_block_gram(cp_kernel_spec(psi), unit_points(psi.d()));
}

CMatrix StinespringDilation::pi(const CMatrix& a) const {
  if (a.rows() != d || a.cols() != d) throw DimensionError("pi: argument must be d x d");
  CMatrix out = CMatrix::Zero(dim_k, dim_k);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      if (a(i, j) != Complex(0.0, 0.0)) out += a(i, j) * units[static_cast<std::size_t>(i * d + j)];
    }
  }
  return out;
}

const CMatrix& StinespringDilation::pi_unit(Index i, Index j) const {
  if (i < 0 || j < 0 || i >= d || j >= d) throw DimensionError("pi_unit: index out of range");
  return units[static_cast<std::size_t>(i * d + j)];
}

double StinespringDilation::exactness_defect(const CpMap& psi) const {
  double worst = 0.0;
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      worst = std::max(worst, max_abs(psi.unit_image(i, j) - v.adjoint() * pi_unit(i, j) * v));
    }
  }
  return worst;
}

double StinespringDilation::multiplicativity_defect() const {
  double worst = 0.0;
  const CMatrix zero = CMatrix::Zero(dim_k, dim_k);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      worst = std::max(worst, max_abs(pi_unit(i, j).adjoint() - pi_unit(j, i)));
      for (Index k = 0; k < d; ++k) {
        for (Index l = 0; l < d; ++l) {
          const CMatrix& expected = (j == k) ? pi_unit(i, l) : zero;
          worst = std::max(worst, max_abs(pi_unit(i, j) * pi_unit(k, l) - expected));
        }
      }
    }
  }
  return worst;
}

Index StinespringDilation::cyclic_span_dimension() const {
  if (dim_k == 0) return 0;
  const Index h = v.cols();
  CMatrix cols(dim_k, d * d * h);
  for (Index p = 0; p < d * d; ++p) cols.middleCols(p * h, h) = units[static_cast<std::size_t>(p)] * v;
  return matrix_rank(cols, kSpanRankTol);
}

StinespringDilation stinespring(const CpMap& psi, double tol) {
  return stinespring(psi, factorize(kernel_from_cp(psi, tol), FactorMode::eigen, tol));
}

StinespringDilation stinespring(const CpMap& psi, const FactorSystem& f) {
  const Index d = psi.d();
  const Index h = psi.h();
  if (f.n() != d * d || f.h() != h || f.mode() != FactorMode::eigen) {
    throw DimensionError("stinespring: factor system must be the eigen factorization of kernel_from_cp(psi)");
  }
  const Index r = f.r();
  StinespringDilation out;
  out.d = d;
  out.dim_k = r;
  out.v = CMatrix::Zero(r, h);
  for (Index m = 0; m < d; ++m) out.v += f.factor(m * d + m);  // section at (I, .)

  CMatrix f_pinv = CMatrix::Zero(f.stacked().cols(), r);
  if (r > 0) {
    const CMatrix small = f.stacked() * f.stacked().adjoint();
    f_pinv = f.stacked().adjoint() * small.ldlt().solve(CMatrix::Identity(r, r));
  }
  // pi(E_ij) sends the section at (E_kl, .) to the one at (E_ij E_kl, .) = delta_jk (E_il, .).
  out.units.reserve(static_cast<std::size_t>(d * d));
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      CMatrix image = CMatrix::Zero(r, f.stacked().cols());
      for (Index l = 0; l < d; ++l) image.middleCols((j * d + l) * h, h) = f.factor(i * d + l);
      out.units.push_back(image * f_pinv);
    }
  }
  out.minimal = out.cyclic_span_dimension() == r;
  return out;
}

StinespringDilation kraus_dilation(const CpMap& psi, double rank_tol) {
  const std::vector<CMatrix> ops = kraus(psi, rank_tol);
  const Index d = psi.d();
  const Index h = psi.h();
  const Index count = static_cast<Index>(ops.size());
  StinespringDilation out;
  out.d = d;
  out.dim_k = d * count;
  out.v = CMatrix::Zero(d * count, h);
  // V h = sum_k (V_k^* h) (x) e_k
  for (Index k = 0; k < count; ++k) {
    const CMatrix adj = ops[static_cast<std::size_t>(k)].adjoint();  // d x h
    for (Index x = 0; x < d; ++x) out.v.row(x * count + k) = adj.row(x);
  }
  const CMatrix id = CMatrix::Identity(count, count);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) out.units.push_back(kron(matrix_unit(d, i, j), id));
  }
  out.minimal = out.cyclic_span_dimension() == out.dim_k;
  return out;
}

CpOrderVerdict cp_order(const CpMap& phi, const CpMap& psi, double tol) {
  if (phi.d() != psi.d() || phi.h() != psi.h()) throw DimensionError("cp_order: maps must share (d, h)");
  CpOrderVerdict out;
  const PsdVerdict choi = psd_check(hermitize(psi.choi().matrix() - phi.choi().matrix()), tol);
  out.holds = choi.is_psd;
  out.min_eigenvalue = choi.min_eigenvalue;

  const std::vector<SamplePoint> points = unit_points(psi.d());
  const BlockGram g_phi = assemble_block_gram(cp_kernel_spec(phi), points);
  const BlockGram g_psi = assemble_block_gram(cp_kernel_spec(psi), points);
  const OrderVerdict kernel = check_order(g_phi, g_psi, tol);
  out.kernel_order_holds = kernel.holds;
  out.kernel_min_eigenvalue = kernel.min_eigenvalue;
  if (out.holds != out.kernel_order_holds) {
    throw NumericalError("order_paths_disagree", "cp_order: Choi and kernel-order verdicts disagree");
  }
  return out;
}

CMatrix rn_sandwich(const StinespringDilation& dil, const HermitianMatrix& t, const CMatrix& a) {
  const CMatrix root = psd_sqrt(t).matrix();
  return dil.v.adjoint() * root * dil.pi(a) * root * dil.v;
}

RnCommutantOperator cp_rn(const CpMap& phi, const CpMap& psi, double tol) {
  const CpOrderVerdict order = cp_order(phi, psi, tol);
  if (!order.holds) {
    throw PreconditionError("order_violated", "cp_rn: psi - phi is not completely positive");
  }
  require_cp(phi, tol, "cp_rn");
  const FactorSystem f = factorize(kernel_from_cp(psi, tol), FactorMode::eigen, tol);
  const RnOperator rn = rn_operator(kernel_from_cp(phi, tol), f, tol);

  RnCommutantOperator out;
  out.t = rn.t;
  out.dilation = stinespring(psi, f);
  const CMatrix& t = out.t.matrix();
  const CMatrix root = psd_sqrt(out.t).matrix();
  const StinespringDilation& dil = out.dilation;
  double formula_gap = 0.0;
  for (Index i = 0; i < psi.d(); ++i) {
    for (Index j = 0; j < psi.d(); ++j) {
      const CMatrix& unit = dil.pi_unit(i, j);
      out.commutator_defect = std::max(out.commutator_defect, max_abs(t * unit - unit * t));
      const CMatrix target = phi.unit_image(i, j);
      const CMatrix sandwich = dil.v.adjoint() * root * unit * root * dil.v;
      const CMatrix direct = dil.v.adjoint() * t * unit * dil.v;
      out.sandwich_defect = std::max(out.sandwich_defect, max_abs(target - sandwich));
      out.direct_defect = std::max(out.direct_defect, max_abs(target - direct));
      formula_gap = std::max(formula_gap, max_abs(sandwich - direct));
    }
  }
  const double t_norm = out.t.dim() == 0 ? 0.0 : spectral_norm(t);
  if (out.commutator_defect > kCommutantTol * t_norm) {
    throw NumericalError("commutant_violated",
                         "cp_rn: T fails to commute with pi (defect " + std::to_string(out.commutator_defect) + ")");
  }
  const double scale = 1.0 + spectral_norm(opk::apply(psi, CMatrix::Identity(psi.d(), psi.d())));
  if (formula_gap > kDualFormulaTol * scale) {
    throw NumericalError("rn_formulas_disagree", "cp_rn: sandwich and direct reconstructions disagree");
  }
  return out;
}

GaussianDraw gp_decompose(const CpMap& psi, Index n_draws, std::uint64_t seed, double tol) {
  const FactorSystem f = factorize(kernel_from_cp(psi, tol), FactorMode::eigen, tol);
  return sample_gp(f, n_draws, seed, OnbMode::standard);
}

}  // namespace opk
