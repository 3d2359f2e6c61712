#include "sgn/sketching.hpp"

#include <numeric>
#include <stdexcept>
#include <vector>

#include "sgn/rng.hpp"

namespace sgn {

SketchDistribution::SketchDistribution(SketchKind kind, int dimension, int tau,
                                       std::uint64_t seed)
    : kind_(kind), dimension_(dimension), tau_(tau), seed_(seed) {
  if (dimension < 1) {
    throw std::invalid_argument("SketchDistribution: dimension must be >= 1");
  }
  if (tau < 1) throw std::invalid_argument("SketchDistribution: tau must be >= 1");
  if (tau > dimension) {
    throw std::invalid_argument("SketchDistribution: tau exceeds dimension");
  }
}

SketchDistribution SketchDistribution::coordinate(int dimension, int tau,
                                                  std::uint64_t seed) {
  return SketchDistribution(SketchKind::kCoordinate, dimension, tau, seed);
}

SketchDistribution SketchDistribution::gaussian(int dimension, int tau,
                                                std::uint64_t seed) {
  return SketchDistribution(SketchKind::kGaussian, dimension, tau, seed);
}

SketchDistribution SketchDistribution::identity(int dimension) {
  return SketchDistribution(SketchKind::kIdentity, dimension, dimension, 0);
}

SketchDistribution SketchDistribution::with_seed(std::uint64_t seed) const {
  SketchDistribution copy = *this;
  copy.seed_ = seed;
  return copy;
}

namespace {

Eigen::MatrixXd coordinate_sample(int d, int tau, CounterRng& rng) {
  // Partial Fisher-Yates: uniformly random tau-subset, distinct coordinates.
  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, tau);
  for (int j = 0; j < tau; ++j) {
    const int pick = j + rng.uniform_int(d - j);
    std::swap(idx[j], idx[pick]);
    s(idx[j], j) = 1.0;
  }
  return s;
}

Eigen::MatrixXd gaussian_sample(int d, int tau, CounterRng& rng) {
  Eigen::MatrixXd s(d, tau);
  for (int j = 0; j < tau; ++j) {
    for (int i = 0; i < d; ++i) s(i, j) = rng.normal();
  }
  return s;
}

}  // namespace

SketchMatrix sample(const SketchDistribution& dist, std::uint64_t position) {
  CounterRng rng(dist.seed(), position);
  return sample(dist, rng);
}

SketchMatrix sample(const SketchDistribution& dist, CounterRng& rng) {
  const int d = dist.dimension();
  const int tau = dist.tau();
  switch (dist.kind()) {
    case SketchKind::kIdentity:
      return {Eigen::MatrixXd::Identity(d, d), d};
    case SketchKind::kCoordinate:
      return {coordinate_sample(d, tau, rng), tau};
    case SketchKind::kGaussian:
      return {gaussian_sample(d, tau, rng), tau};
    case SketchKind::kHessianWhitened: {
      Eigen::MatrixXd base;
      switch (dist.base_kind_) {
        case SketchKind::kCoordinate:
          base = coordinate_sample(d, tau, rng);
          break;
        case SketchKind::kGaussian:
          base = gaussian_sample(d, tau, rng);
          break;
        case SketchKind::kIdentity:
          base = Eigen::MatrixXd::Identity(d, d);
          break;
        default:
          throw std::logic_error("sample: unsupported whitened base");
      }
      return {(*dist.inverse_sqrt_) * base, tau};
    }
  }
  throw std::logic_error("sample: unknown sketch kind");
}

SketchDistribution whiten(const SketchDistribution& base,
                          const GeometryContext& ctx) {
  if (base.kind() == SketchKind::kHessianWhitened) {
    throw std::invalid_argument("whiten: base distribution is already whitened");
  }
  if (base.dimension() != ctx.dimension()) {
    throw std::invalid_argument("whiten: dimension mismatch");
  }
  SketchDistribution dist = base;
  dist.kind_ = SketchKind::kHessianWhitened;
  dist.base_kind_ = base.kind();
  // Throws when ctx is singular: the inverse square root is undefined.
  dist.inverse_sqrt_ =
      std::make_shared<const Eigen::MatrixXd>(ctx.inverse_sqrt());
  return dist;
}

ProjectionBias projection_bias(const SketchDistribution& dist,
                               const GeometryContext& ctx, int samples) {
  if (samples < 1) {
    throw std::invalid_argument("projection_bias: samples must be >= 1");
  }
  const int d = ctx.dimension();
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < samples; ++i) {
    const SketchMatrix s = sample(dist, static_cast<std::uint64_t>(i));
    mean += projection(ctx, s.matrix).matrix();
  }
  mean /= static_cast<double>(samples);
  const double ratio = static_cast<double>(dist.tau()) / d;
  ProjectionBias out;
  out.deviation = (mean - ratio * Eigen::MatrixXd::Identity(d, d)).norm();
  out.mean = std::move(mean);
  return out;
}

double expected_rank(const SketchDistribution& dist, const GeometryContext& ctx,
                     int samples) {
  if (samples < 1) {
    throw std::invalid_argument("expected_rank: samples must be >= 1");
  }
  double total = 0.0;
  for (int i = 0; i < samples; ++i) {
    const SketchMatrix s = sample(dist, static_cast<std::uint64_t>(i));
    // trace(P_x) = trace((S^T H S)^dagger (S^T H S)), a tau x tau product.
    const Eigen::MatrixXd gram =
        s.matrix.transpose() * ctx.hessian() * s.matrix;
    const Eigen::MatrixXd sym = 0.5 * (gram + gram.transpose());
    total += (pseudo_inverse(sym, ctx.rank_tolerance()) * sym).trace();
  }
  return total / static_cast<double>(samples);
}

}  // namespace sgn
