#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "opkernel/cp_map.hpp"
#include "opkernel/kernels.hpp"

namespace opk::testing {

inline const double kQ = std::exp(-0.5);  // Gaussian(sigma=1) at distance 1

/// Fixture A: Gaussian(sigma = 1) times I_2.
inline OperatorKernelSpec fixture_a() {
  return OperatorKernelSpec::separable(2, {{ScalarKernelSpec::gaussian(1.0), CMatrix::Identity(2, 2)}});
}

inline std::vector<SamplePoint> points_01() { return {SamplePoint::scalar(0.0), SamplePoint::scalar(1.0)}; }

/// Fixture B: explicit factors A(0) = diag(1, 0), A(1) = diag(0, 1).
inline OperatorKernelSpec fixture_b() {
  CMatrix a0 = CMatrix::Zero(2, 2);
  a0(0, 0) = 1.0;
  CMatrix a1 = CMatrix::Zero(2, 2);
  a1(1, 1) = 1.0;
  return OperatorKernelSpec::explicit_factor({a0, a1});
}

/// K = diag(k1, k2) with k1 Gaussian(sigma1) and k2 Gaussian(sigma2).
inline OperatorKernelSpec diag_kernel(double sigma1, double sigma2) {
  CMatrix e1 = CMatrix::Zero(2, 2);
  e1(0, 0) = 1.0;
  CMatrix e2 = CMatrix::Zero(2, 2);
  e2(1, 1) = 1.0;
  return OperatorKernelSpec::separable(2, {{ScalarKernelSpec::gaussian(sigma1), e1},
                                           {ScalarKernelSpec::gaussian(sigma2), e2}});
}

inline std::vector<SamplePoint> index_points(Index n) {
  std::vector<SamplePoint> pts;
  for (Index i = 0; i < n; ++i) pts.push_back(SamplePoint::index(i));
  return pts;
}

inline CpMap identity_channel(Index d) { return CpMap::from_kraus(d, d, {CMatrix::Identity(d, d)}); }

/// psi(A) = Trace(A) I_2 / 2.
inline CpMap depolarizing_qubit() {
  std::vector<CMatrix> images;
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) images.push_back(i == j ? CMatrix(CMatrix::Identity(2, 2) * 0.5) : CMatrix(CMatrix::Zero(2, 2)));
  }
  return CpMap::from_action(2, 2, images);
}

/// A -> A^T on M_d.
inline CpMap transpose_map(Index d) {
  std::vector<CMatrix> images;
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) images.push_back(matrix_unit(d, j, i));
  }
  return CpMap::from_action(d, d, images);
}

class Random {
 public:
  explicit Random(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  Index integer(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(gen_); }

  CMatrix complex_matrix(Index rows, Index cols) {
    CMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) m(i, j) = Complex(normal(), normal());
    }
    return m;
  }

  CVector complex_vector(Index n) { return complex_matrix(n, 1).col(0); }

  CMatrix hermitian(Index n) {
    const CMatrix a = complex_matrix(n, n);
    return 0.5 * (a + a.adjoint());
  }

  /// A A^* with A n x rank.
  CMatrix psd(Index n, Index rank) {
    const CMatrix a = complex_matrix(n, rank);
    return a * a.adjoint();
  }

  /// Separable kernel with 1-3 terms of random families and PSD coefficients.
  OperatorKernelSpec separable_kernel(Index h) {
    const Index terms = integer(1, 3);
    std::vector<SeparableKernel::Term> out;
    for (Index t = 0; t < terms; ++t) {
      ScalarKernelSpec k;
      switch (integer(0, 2)) {
        case 0:
          k = ScalarKernelSpec::gaussian(uniform(0.5, 2.0));
          break;
        case 1:
          k = ScalarKernelSpec::laplacian(uniform(0.5, 2.0));
          break;
        default:
          k = ScalarKernelSpec::polynomial(static_cast<int>(integer(1, 3)), uniform(0.0, 1.0));
          break;
      }
      out.push_back({k, psd(h, integer(1, h)) / static_cast<double>(h)});
    }
    return OperatorKernelSpec::separable(h, std::move(out));
  }

  std::vector<SamplePoint> points(Index n, Index m) {
    std::vector<SamplePoint> pts;
    for (Index i = 0; i < n; ++i) {
      SamplePoint p;
      p.coordinates = RVector(m);
      for (Index k = 0; k < m; ++k) p.coordinates(k) = uniform(-1.5, 1.5);
      pts.push_back(std::move(p));
    }
    return pts;
  }

  std::vector<CMatrix> kraus_ops(Index d, Index h, Index count) {
    std::vector<CMatrix> ops;
    for (Index k = 0; k < count; ++k) ops.push_back(complex_matrix(h, d) / std::sqrt(static_cast<double>(d * count)));
    return ops;
  }

  CpMap cp_map(Index d, Index h) { return CpMap::from_kraus(d, h, kraus_ops(d, h, integer(1, d * h))); }

  /// Unitary from the QR factor of a Gaussian matrix.
  CMatrix unitary(Index n) {
    Eigen::HouseholderQR<CMatrix> qr(complex_matrix(n, n));
    return qr.householderQ() * CMatrix::Identity(n, n);
  }

  /// 0 <= T <= I with random spectrum in [lo, hi].
  CMatrix contraction(Index n, double lo = 0.0, double hi = 1.0) {
    const CMatrix u = unitary(n);
    CVector spec(n);
    for (Index k = 0; k < n; ++k) spec(k) = uniform(lo, hi);
    return u * spec.asDiagonal() * u.adjoint();
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace opk::testing
