#include "opkernel/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "opkernel/errors.hpp"

namespace opk {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSalt = 0x632BE59BD9B4E019ULL;

CMatrix onb_matrix(const FactorSystem& f, OnbMode onb) {
  const Index r = f.r();
  if (onb == OnbMode::standard || r == 0) return CMatrix::Identity(r, r);
  return spectral(hermitize(f.stacked() * f.stacked().adjoint())).eigenvectors;
}

GaussianDraw sample_with(const FactorSystem& f, const CMatrix* transform, Index n_draws, std::uint64_t seed,
                         OnbMode onb) {
  if (n_draws < 1) throw DimensionError("sampling needs at least one draw");
  const Index r = f.r();
  GaussianDraw out(n_draws, f.n(), f.h(), seed, onb);
  if (r == 0) return out;

  const CMatrix basis = onb_matrix(f, onb);
  const CMatrix adjoint = f.stacked().adjoint();  // nh x r
  RVector z(r);
  CVector y(r);
  for (Index d = 0; d < n_draws; ++d) {
    NormalStream stream(seed, static_cast<std::uint64_t>(d));
    for (Index k = 0; k < r; ++k) z(k) = stream.next();
    if (onb == OnbMode::standard) {
      y = z.cast<Complex>();
    } else {
      y = basis * z.cast<Complex>();
    }
    if (transform != nullptr) y = (*transform) * y;
    out.stacked(d) = adjoint * y;
  }
  return out;
}

void check_vectors(const GaussianDraw& draws, const CVector& a, const CVector& b, Index i, Index j) {
  if (draws.n_draws() < 1) throw DimensionError("empirical covariance of an empty draw set");
  if (a.size() != draws.h() || b.size() != draws.h()) {
    throw DimensionError("empirical covariance: vectors must have dimension h");
  }
  if (i < 0 || j < 0 || i >= draws.n() || j >= draws.n()) {
    throw DimensionError("empirical covariance: point index out of range");
  }
}

}  // namespace

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream)
    : state_(mix(seed ^ mix(stream + kStreamSalt))) {}

std::uint64_t NormalStream::mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double NormalStream::next_uniform() {
  state_ += kGolden;
  return static_cast<double>(mix(state_) >> 11) * 0x1.0p-53;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double rad = std::sqrt(-2.0 * std::log(1.0 - u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = rad * std::sin(angle);
  has_spare_ = true;
  return rad * std::cos(angle);
}

GaussianDraw::GaussianDraw(Index n_draws, Index n, Index h, std::uint64_t seed, OnbMode onb)
    : n_draws_(n_draws),
      n_(n),
      h_(h),
      seed_(seed),
      onb_(onb),
      samples_(static_cast<std::size_t>(n_draws * n * h), Complex(0.0, 0.0)) {}

Complex GaussianDraw::at(Index draw, Index i, Index a) const {
  return samples_[static_cast<std::size_t>((draw * n_ + i) * h_ + a)];
}

CVector GaussianDraw::value(Index draw, Index i) const { return stacked(draw).segment(i * h_, h_); }

Eigen::Map<const CVector> GaussianDraw::stacked(Index draw) const {
  return Eigen::Map<const CVector>(samples_.data() + draw * n_ * h_, n_ * h_);
}

Eigen::Map<CVector> GaussianDraw::stacked(Index draw) {
  return Eigen::Map<CVector>(samples_.data() + draw * n_ * h_, n_ * h_);
}

GaussianDraw sample_gp(const FactorSystem& f, Index n_draws, std::uint64_t seed, OnbMode onb) {
  return sample_with(f, nullptr, n_draws, seed, onb);
}

Complex empirical_covariance(const GaussianDraw& draws, const CVector& a, const CVector& b, Index i, Index j) {
  check_vectors(draws, a, b, i, j);
  Complex sum(0.0, 0.0);
  for (Index d = 0; d < draws.n_draws(); ++d) {
    const CVector ws = draws.value(d, i);
    const CVector wt = draws.value(d, j);
    sum += a.dot(ws) * wt.dot(b);
  }
  return sum / static_cast<double>(draws.n_draws());
}

Complex empirical_pseudo_covariance(const GaussianDraw& draws, const CVector& a, const CVector& b, Index i,
                                    Index j) {
  check_vectors(draws, a, b, i, j);
  Complex sum(0.0, 0.0);
  for (Index d = 0; d < draws.n_draws(); ++d) {
    sum += a.dot(draws.value(d, i)) * b.dot(draws.value(d, j));
  }
  return sum / static_cast<double>(draws.n_draws());
}

CMatrix empirical_covariance_matrix(const GaussianDraw& draws) {
  if (draws.n_draws() < 1) throw DimensionError("empirical covariance of an empty draw set");
  const Index m = draws.n() * draws.h();
  CMatrix acc = CMatrix::Zero(m, m);
  for (Index d = 0; d < draws.n_draws(); ++d) {
    const auto w = draws.stacked(d);
    acc.noalias() += w * w.adjoint();
  }
  return acc / static_cast<double>(draws.n_draws());
}

GaussianDraw derived_process(const FactorSystem& fl, const HermitianMatrix& t, Index n_draws,
                             std::uint64_t seed, OnbMode onb) {
  if (t.dim() != fl.r()) {
    throw DimensionError("derived_process: T must act on the " + std::to_string(fl.r()) +
                         "-dimensional factor space");
  }
  if (t.dim() > 0) {
    const SpectralDecomposition sd = spectral(t);
    if (sd.eigenvalues(0) > 1.0 + kRnSpectrumTol || sd.eigenvalues(t.dim() - 1) < -kRnSpectrumTol) {
      throw PreconditionError("t_out_of_range", "derived_process: T must satisfy 0 <= T <= I");
    }
  }
  const CMatrix root = psd_sqrt(t).matrix();
  return sample_with(fl, &root, n_draws, seed, onb);
}

GaussianDraw derived_process(const FactorSystem& fl, const RnOperator& t, Index n_draws, std::uint64_t seed,
                             OnbMode onb) {
  return derived_process(fl, t.t, n_draws, seed, onb);
}

}  // namespace opk
