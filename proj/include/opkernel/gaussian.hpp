#pragma once

#include <cstdint>
#include <vector>

#include "opkernel/ordering.hpp"
#include "opkernel/rkhs.hpp"

namespace opk {

/// Orthonormal basis of the factor space C^r used to expand the process.
enum class OnbMode {
  standard,  // canonical basis e_1..e_r
  eigen,     // eigenvectors of F F^* (descending eigenvalue order)
};

/// Counter-based stream of real standard normals.
///
/// Each (seed, stream) pair selects an independent SplitMix64 sequence whose
/// starting state is mix(seed ^ mix(stream + 0x632BE59BD9B4E019)); every
/// 64-bit output u is mapped to [0, 1) as (u >> 11) * 2^-53. Normals come in
/// Box-Muller pairs from two consecutive uniforms u1, u2:
/// rad = sqrt(-2 ln(1 - u1)), z0 = rad cos(2 pi u2), z1 = rad sin(2 pi u2).
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream);

  double next();

  /// Raw uniform in [0, 1); exposed for the stream-advance tests.
  double next_uniform();

  static std::uint64_t mix(std::uint64_t z) noexcept;

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Samples W(s_i) in H for every sample point, for each draw.
class GaussianDraw {
 public:
  GaussianDraw() = default;
  GaussianDraw(Index n_draws, Index n, Index h, std::uint64_t seed, OnbMode onb);

  Index n_draws() const noexcept { return n_draws_; }
  Index n() const noexcept { return n_; }
  Index h() const noexcept { return h_; }
  std::uint64_t seed() const noexcept { return seed_; }
  OnbMode onb_mode() const noexcept { return onb_; }

  /// Coordinate a of W(s_i) in the given draw.
  Complex at(Index draw, Index i, Index a) const;
  /// W(s_i) for one draw.
  CVector value(Index draw, Index i) const;
  /// All points of one draw stacked as an nh vector.
  Eigen::Map<const CVector> stacked(Index draw) const;
  Eigen::Map<CVector> stacked(Index draw);

  const std::vector<Complex>& samples() const noexcept { return samples_; }

 private:
  Index n_draws_ = 0;
  Index n_ = 0;
  Index h_ = 0;
  std::uint64_t seed_ = 0;
  OnbMode onb_ = OnbMode::standard;
  std::vector<Complex> samples_;  // [draw][point][coordinate]
};

/// W(s_i) = sum_k (V(s_i)^* phi_k) Z_k with Z_k i.i.d. real N(0, 1). Draw d
/// reads its Z from NormalStream(seed, d).
GaussianDraw sample_gp(const FactorSystem& f, Index n_draws, std::uint64_t seed,
                       OnbMode onb = OnbMode::standard);

/// Sample mean of <a, W(s_i)> <W(s_j), b>; estimates <a, K(s_i,s_j) b>.
Complex empirical_covariance(const GaussianDraw& draws, const CVector& a, const CVector& b, Index i, Index j);

/// Diagnostic: sample mean of <a, W(s_i)> <b, W(s_j)> (no conjugate on the
/// second factor).
Complex empirical_pseudo_covariance(const GaussianDraw& draws, const CVector& a, const CVector& b, Index i,
                                    Index j);

/// nh x nh matrix of all empirical_covariance entries against standard basis
/// vectors; entry (i*h+a, j*h+b) estimates G(i*h+a, j*h+b).
CMatrix empirical_covariance_matrix(const GaussianDraw& draws);

/// W_K(s_i) = sum_k (V_L(s_i)^* T^{1/2} phi_k) Z_k, with 0 <= T <= I on the
/// factor space of F_L.
GaussianDraw derived_process(const FactorSystem& fl, const HermitianMatrix& t, Index n_draws,
                             std::uint64_t seed, OnbMode onb = OnbMode::standard);
GaussianDraw derived_process(const FactorSystem& fl, const RnOperator& t, Index n_draws, std::uint64_t seed,
                             OnbMode onb = OnbMode::standard);

}  // namespace opk
