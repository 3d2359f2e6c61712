#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>

#include "sgn/geometry.hpp"
#include "sgn/rng.hpp"

namespace sgn {

enum class SketchKind { kCoordinate, kGaussian, kIdentity, kHessianWhitened };

// d x tau sample together with its rank (== column count).
struct SketchMatrix {
  Eigen::MatrixXd matrix;
  int rank = 0;
};

// Immutable descriptor of a sketch-matrix distribution. Sampling takes an
// explicit stream position, so concurrent samplers never share mutable state
// and sample(dist, k) is reproducible from (seed, k) alone.
class SketchDistribution {
 public:
  static SketchDistribution coordinate(int dimension, int tau,
                                       std::uint64_t seed);
  static SketchDistribution gaussian(int dimension, int tau,
                                     std::uint64_t seed);
  static SketchDistribution identity(int dimension);

  SketchKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  int tau() const { return tau_; }
  std::uint64_t seed() const { return seed_; }

  // Same distribution, different seed stream (one per replication).
  SketchDistribution with_seed(std::uint64_t seed) const;

 private:
  friend SketchMatrix sample(const SketchDistribution&, CounterRng&);
  friend SketchDistribution whiten(const SketchDistribution&,
                                   const GeometryContext&);

  SketchDistribution(SketchKind kind, int dimension, int tau,
                     std::uint64_t seed);

  SketchKind kind_;
  int dimension_;
  int tau_;
  std::uint64_t seed_;
  // H^{-1/2} for whitened distributions; shared so copies stay cheap.
  std::shared_ptr<const Eigen::MatrixXd> inverse_sqrt_;
  SketchKind base_kind_ = SketchKind::kCoordinate;
};

// Draws the sample at the given stream position.
SketchMatrix sample(const SketchDistribution& dist, std::uint64_t position);

// Draws a sample from caller-provided randomness (Monte-Carlo loops that own
// their streams).
SketchMatrix sample(const SketchDistribution& dist, CounterRng& rng);

// Turns an l2-unbiased base distribution into one whose projection P_x is
// unbiased in the local norm at ctx: samples S = H^{-1/2} M with M ~ base.
// Requires a positive definite ctx.
SketchDistribution whiten(const SketchDistribution& base,
                          const GeometryContext& ctx);

struct ProjectionBias {
  Eigen::MatrixXd mean;  // Monte-Carlo mean of P_x
  double deviation = 0;  // Frobenius distance to (tau/d) I
};

// Monte-Carlo estimate of E[P_x] and its distance to (tau/d) I.
ProjectionBias projection_bias(const SketchDistribution& dist,
                               const GeometryContext& ctx, int samples);

// Monte-Carlo mean of trace(P_x), estimating the expected sketch rank.
double expected_rank(const SketchDistribution& dist,
                     const GeometryContext& ctx, int samples);

}  // namespace sgn
