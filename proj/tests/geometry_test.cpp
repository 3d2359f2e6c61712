#include "sgn/geometry.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "sgn/rng.hpp"
#include "sgn/sketching.hpp"
#include "test_support.hpp"

using sgn::CounterRng;
using sgn::GeometryContext;
using sgn::ProjectionOperator;
using sgn::testing::random_spd;
using sgn::testing::random_symmetric;
using sgn::testing::random_vector;

namespace {

Eigen::MatrixXd diag2(double a, double b) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST(LocalNorm, DiagonalQuadraticForm) {
  const GeometryContext ctx(diag2(4, 9));
  EXPECT_NEAR(local_norm(ctx, Eigen::Vector2d(1, 1)), std::sqrt(13.0), 1e-14);
  EXPECT_EQ(local_norm(ctx, Eigen::Vector2d(0, 0)), 0.0);
}

TEST(LocalNorm, MatchesExplicitDenseMultiply) {
  for (int i = 0; i < 200; ++i) {
    CounterRng rng(1, i);
    const int d = 2 + i % 6;
    const Eigen::MatrixXd h = random_spd(d, 0.2, 5.0, rng);
    const GeometryContext ctx(h);
    const Eigen::VectorXd v = random_vector(d, rng);
    const double expected = std::sqrt(v.dot(h * v));
    EXPECT_NEAR(local_norm(ctx, v), expected, 1e-10 * (1.0 + expected));
  }
}

TEST(LocalNorm, DimensionMismatchThrows) {
  const GeometryContext ctx(diag2(1, 1));
  EXPECT_THROW(local_norm(ctx, Eigen::Vector3d(1, 2, 3)),
               std::invalid_argument);
}

TEST(LocalNorm, AffineInvariance) {
  for (int i = 0; i < 100; ++i) {
    CounterRng rng(2, i);
    const int d = 3 + i % 4;
    const Eigen::MatrixXd h = random_spd(d, 0.3, 4.0, rng);
    Eigen::MatrixXd map = random_spd(d, 0.5, 2.0, rng);
    const Eigen::VectorXd v = random_vector(d, rng);
    const GeometryContext original(h);
    const GeometryContext transformed(map.transpose() * h * map);
    const double lhs = local_norm(transformed, map.inverse() * v);
    const double rhs = local_norm(original, v);
    EXPECT_NEAR(lhs, rhs, 1e-8 * (1.0 + rhs));
  }
}

TEST(DualNorm, DiagonalExample) {
  const GeometryContext ctx(diag2(4, 9));
  EXPECT_NEAR(dual_norm(ctx, Eigen::Vector2d(2, 3)), std::sqrt(2.0), 1e-14);
  EXPECT_EQ(dual_norm(ctx, Eigen::Vector2d(0, 0)), 0.0);
}

TEST(DualNorm, MatchesDenseSolve) {
  for (int i = 0; i < 200; ++i) {
    CounterRng rng(3, i);
    const int d = 2 + i % 6;
    const Eigen::MatrixXd h = random_spd(d, 0.2, 5.0, rng);
    const GeometryContext ctx(h);
    const Eigen::VectorXd g = random_vector(d, rng);
    const double expected = std::sqrt(g.dot(h.llt().solve(g)));
    EXPECT_NEAR(dual_norm(ctx, g), expected, 1e-9 * (1.0 + expected));
  }
}

TEST(DualNorm, OutOfRangeThrows) {
  const GeometryContext ctx(diag2(1, 0));
  EXPECT_THROW(dual_norm(ctx, Eigen::Vector2d(0, 1)), sgn::RangeViolation);
  EXPECT_NEAR(dual_norm(ctx, Eigen::Vector2d(1, 0)), 1.0, 1e-14);
}

TEST(RangeCheck, Examples) {
  CounterRng rng(4);
  const GeometryContext spd(random_spd(5, 0.5, 2.0, rng));
  EXPECT_TRUE(range_check(spd, random_vector(5, rng)));
  const GeometryContext singular(diag2(1, 0));
  EXPECT_FALSE(range_check(singular, Eigen::Vector2d(0, 1)));
  EXPECT_TRUE(range_check(singular, Eigen::Vector2d(1, 0)));
  EXPECT_TRUE(range_check(singular, Eigen::Vector2d(0, 0)));
}

TEST(PseudoInverse, Examples) {
  EXPECT_TRUE(sgn::pseudo_inverse(diag2(2, 0)).isApprox(diag2(0.5, 0), 1e-12));
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_TRUE(sgn::pseudo_inverse(eye).isApprox(eye, 1e-12));
}

TEST(PseudoInverse, PenroseIdentitiesOnRankDeficientInput) {
  for (int i = 0; i < 100; ++i) {
    CounterRng rng(5, i);
    const int d = 4 + i % 4;
    Eigen::VectorXd eigs(d);
    for (int j = 0; j < d; ++j) {
      eigs[j] = j < 2 ? 0.0 : 0.5 + 2.0 * rng.uniform();
    }
    const Eigen::MatrixXd m = random_symmetric(eigs, rng);
    const Eigen::MatrixXd p = sgn::pseudo_inverse(m);
    EXPECT_LE((m * p * m - m).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((p * m * p - p).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((m * p - (m * p).transpose()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((p * m - (p * m).transpose()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(PseudoInverse, AsymmetricInputThrows) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 0, 1;
  EXPECT_THROW(sgn::pseudo_inverse(m), std::invalid_argument);
}

TEST(GeometryContext, RejectsAsymmetry) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 1e-3, 0, 1;
  EXPECT_THROW(GeometryContext ctx(m), std::invalid_argument);
}

TEST(Projection, FullSpaceSketchIsIdentity) {
  CounterRng rng(6);
  const GeometryContext ctx(random_spd(4, 0.5, 3.0, rng));
  const ProjectionOperator proj(ctx, Eigen::MatrixXd::Identity(4, 4));
  EXPECT_TRUE(proj.matrix().isIdentity(0.0));
}

TEST(Projection, HandComputedCoordinateCase) {
  const GeometryContext ctx(diag2(2, 3));
  Eigen::MatrixXd sketch(2, 1);
  sketch << 1, 0;
  const ProjectionOperator proj(ctx, sketch);
  EXPECT_TRUE(proj.matrix().isApprox(diag2(1, 0), 1e-14));
}

TEST(Projection, CleanRankDeficientCase) {
  // Null-space-aligned coordinate sketch: the projector vanishes.
  const GeometryContext ctx(diag2(1, 0));
  Eigen::MatrixXd sketch(2, 1);
  sketch << 0, 1;
  const ProjectionOperator proj(ctx, sketch);
  EXPECT_LE(proj.matrix().cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Projection, IdempotentAndPythagoras) {
  for (int i = 0; i < 300; ++i) {
    CounterRng rng(7, i);
    const int d = 5 + i % 5;
    const int tau = 1 + i % 3;
    const GeometryContext ctx(random_spd(d, 0.3, 3.0, rng));
    const auto dist = i % 2 == 0
                          ? sgn::SketchDistribution::coordinate(d, tau, 7)
                          : sgn::SketchDistribution::gaussian(d, tau, 7);
    const ProjectionOperator proj(ctx, sgn::sample(dist, i).matrix);
    const Eigen::MatrixXd& p = proj.matrix();
    EXPECT_LE((p * p - p).cwiseAbs().maxCoeff(), 1e-10);
    // self-adjoint in the H inner product: H P is symmetric
    const Eigen::MatrixXd hp = ctx.hessian() * p;
    EXPECT_LE((hp - hp.transpose()).cwiseAbs().maxCoeff(), 1e-10);

    const Eigen::VectorXd h = random_vector(d, rng);
    const double nh = local_norm(ctx, h);
    const double nph = local_norm(ctx, proj.apply(h));
    const double nres = local_norm(ctx, h - proj.apply(h));
    EXPECT_LE(nph, nh * (1.0 + 1e-12));  // contraction
    EXPECT_NEAR(nph * nph + nres * nres, nh * nh, 1e-10 * (1.0 + nh * nh));
  }
}

TEST(Projection, DualNormContraction) {
  for (int i = 0; i < 200; ++i) {
    CounterRng rng(8, i);
    const int d = 4 + i % 5;
    const GeometryContext ctx(random_spd(d, 0.3, 3.0, rng));
    const auto dist = sgn::SketchDistribution::gaussian(d, 1 + i % 2, 8);
    const ProjectionOperator proj(ctx, sgn::sample(dist, i).matrix);
    const Eigen::VectorXd g = random_vector(d, rng);
    ASSERT_TRUE(range_check(ctx, g));
    const double full = dual_norm(ctx, g);
    const double projected = dual_norm(ctx, proj.apply_transpose(g));
    EXPECT_LE(projected, full * (1.0 + 1e-10));
  }
}

TEST(Projection, DenseRealizationOnlyBelowLimit) {
  const int d = ProjectionOperator::kDenseLimit + 8;
  const GeometryContext ctx(Eigen::MatrixXd::Identity(d, d));
  Eigen::MatrixXd sketch = Eigen::MatrixXd::Zero(d, 1);
  sketch(3, 0) = 1.0;
  const ProjectionOperator proj(ctx, sketch);
  EXPECT_FALSE(proj.has_matrix());
  EXPECT_THROW(proj.matrix(), std::logic_error);
  Eigen::VectorXd h = Eigen::VectorXd::LinSpaced(d, 0.0, 1.0);
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(d);
  expected[3] = h[3];
  EXPECT_TRUE(proj.apply(h).isApprox(expected, 1e-14));
}

TEST(Projection, FactoredApplyMatchesDenseMatrix) {
  CounterRng rng(9);
  const int d = 7;
  const GeometryContext ctx(random_spd(d, 0.4, 2.5, rng));
  Eigen::MatrixXd s(d, 2);
  s.col(0) = random_vector(d, rng);
  s.col(1) = random_vector(d, rng);
  const ProjectionOperator proj(ctx, s);
  const Eigen::VectorXd h = random_vector(d, rng);
  EXPECT_TRUE(proj.apply(h).isApprox(proj.matrix() * h, 1e-12));
  EXPECT_TRUE(proj.apply_transpose(h).isApprox(
      proj.matrix().transpose() * h, 1e-12));
}
