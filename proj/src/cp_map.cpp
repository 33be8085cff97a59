#include "opkernel/cp_map.hpp"

#include <string>

#include "opkernel/errors.hpp"

namespace opk {

namespace {

constexpr double kChoiHermitianTol = 1e-9;

}  // namespace

CpMap CpMap::from_choi(Index d, Index h, const CMatrix& choi) {
  if (d < 1 || h < 1) throw DimensionError("CpMap: d and h must be positive");
  if (choi.rows() != d * h || choi.cols() != d * h) {
    throw DimensionError("CpMap: Choi matrix must be " + std::to_string(d * h) + "x" +
                         std::to_string(d * h));
  }
  CpMap out;
  out.d_ = d;
  out.h_ = h;
  out.choi_ = hermitize(choi);
  if (out.choi_.defect() > kChoiHermitianTol * (1.0 + max_abs(choi))) {
    throw PreconditionError("choi_not_hermitian",
                            "CpMap: Choi matrix is not Hermitian (map does not preserve adjoints)");
  }
  return out;
}

CpMap CpMap::from_kraus(Index d, Index h, const std::vector<CMatrix>& kraus) {
  CMatrix choi = CMatrix::Zero(d * h, d * h);
  for (const CMatrix& v : kraus) {
    if (v.rows() != h || v.cols() != d) {
      throw DimensionError("CpMap::from_kraus: Kraus operators must be h x d");
    }
    // vec_k[i*h + a] = V_k(a, i)
    CVector vec(d * h);
    for (Index i = 0; i < d; ++i) vec.segment(i * h, h) = v.col(i);
    choi += vec * vec.adjoint();
  }
  return from_choi(d, h, choi);
}

CpMap CpMap::from_action(Index d, Index h, const std::vector<CMatrix>& images) {
  if (static_cast<Index>(images.size()) != d * d) {
    throw DimensionError("CpMap::from_action: expected d*d images");
  }
  CMatrix choi(d * h, d * h);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      const CMatrix& img = images[static_cast<std::size_t>(i * d + j)];
      if (img.rows() != h || img.cols() != h) {
        throw DimensionError("CpMap::from_action: images must be h x h");
      }
      choi.block(i * h, j * h, h, h) = img;
    }
  }
  return from_choi(d, h, choi);
}

CMatrix CpMap::unit_image(Index i, Index j) const {
  if (i < 0 || j < 0 || i >= d_ || j >= d_) throw DimensionError("CpMap: matrix unit out of range");
  return choi_.matrix().block(i * h_, j * h_, h_, h_);
}

CpMap CpMap::scaled(double factor) const {
  return from_choi(d_, h_, choi_.matrix() * factor);
}

CMatrix apply(const CpMap& psi, const CMatrix& a) {
  const Index d = psi.d();
  const Index h = psi.h();
  if (a.rows() != d || a.cols() != d) {
    throw DimensionError("apply: argument must be " + std::to_string(d) + "x" + std::to_string(d));
  }
  CMatrix out = CMatrix::Zero(h, h);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      if (a(i, j) != Complex(0.0, 0.0)) out += a(i, j) * psi.choi().matrix().block(i * h, j * h, h, h);
    }
  }
  return out;
}

CMatrix matrix_unit(Index d, Index i, Index j) {
  CMatrix e = CMatrix::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

}  // namespace opk
