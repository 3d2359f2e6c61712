#include "sgn/solvers.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "sgn/data_io.hpp"
#include "sgn/geometry.hpp"
#include "sgn/objectives.hpp"
#include "sgn/validation.hpp"
#include "test_support.hpp"

using sgn::Algorithm;
using sgn::CounterRng;
using sgn::sgn_stepsize;
using sgn::GeometryContext;
using sgn::LogisticRegression;
using sgn::Quadratic;
using sgn::RunResult;
using sgn::SketchDistribution;
using sgn::SketchMatrix;
using sgn::SolverConfig;
using sgn::SolverState;
using sgn::StepReport;
using sgn::testing::random_spd;
using sgn::testing::random_vector;

namespace {

LogisticRegression make_logistic(int n, int d, double kappa,
                                 std::uint64_t seed) {
  sgn::Dataset data = sgn::synth_logistic(n, d, kappa, seed);
  const double reg = LogisticRegression::default_regularization(data);
  return LogisticRegression(std::move(data), reg);
}

double semi_strong_bound(const LogisticRegression& oracle) {
  return sgn::estimate_semi_strong(oracle.hessian_lipschitz_l2(),
                                   oracle.strong_convexity());
}

SketchMatrix identity_sketch(int d) {
  return {Eigen::MatrixXd::Identity(d, d), d};
}

// Oracle stub whose gradient leaves the Hessian range; drives error paths.
class OutOfRangeOracle : public sgn::ObjectiveOracle {
 public:
  int dimension() const override { return 2; }
  double value(const Eigen::VectorXd&) const override { return 0.0; }
  Eigen::VectorXd gradient(const Eigen::VectorXd&) const override {
    return Eigen::Vector2d(0.0, 1.0);
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd&) const override {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
    h(0, 0) = 1.0;
    return h;
  }
};

}  // namespace

TEST(Stepsize, SpotValues) {
  EXPECT_DOUBLE_EQ(sgn_stepsize(2.0, 2.0), 0.5);  // product 4
  EXPECT_NEAR(sgn_stepsize(3.0, 4.0), 1.0 / 3.0, 1e-16);
  EXPECT_EQ(sgn_stepsize(1.0, 0.0), 1.0);
  EXPECT_EQ(sgn_stepsize(0.0, 5.0), 1.0);
}

TEST(Stepsize, LimitsAndErrors) {
  EXPECT_NEAR(sgn_stepsize(1e-14, 1.0), 1.0, 1e-13);
  EXPECT_LE(sgn_stepsize(1e8, 1e8), 1e-7);
  EXPECT_THROW(sgn_stepsize(-1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(sgn_stepsize(1.0, -1.0), std::invalid_argument);
}

TEST(Stepsize, RootResidualRangeAndBound) {
  CounterRng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double l = std::pow(10.0, -8.0 + 14.0 * rng.uniform());
    const double g = std::pow(10.0, -8.0 + 14.0 * rng.uniform());
    const double a = sgn_stepsize(l, g);
    EXPECT_LE(std::abs(1.0 - a - 0.5 * l * g * a * a), 1e-12);
    EXPECT_GT(a, 0.0);
    EXPECT_LE(a, 1.0);
    EXPECT_LE(a, std::sqrt(2.0 / (l * g)) * (1.0 + 1e-12));
  }
}

TEST(SgnStep, FullSketchTinyConstantSolvesQuadratic) {
  CounterRng rng(2);
  const int d = 6;
  const Quadratic oracle(random_spd(d, 0.5, 3.0, rng), random_vector(d, rng));
  SolverState state;
  state.x = random_vector(d, rng);
  SolverConfig config;
  config.constants.l_alg = 1e-12;
  const StepReport report =
      sgn_step(oracle, state, identity_sketch(d), config);
  EXPECT_LE((report.new_x - oracle.minimizer()).norm(), 1e-10);
  EXPECT_NEAR(report.alpha, 1.0, 1e-10);
}

TEST(SgnStep, ZeroSketchedGradientIsNullStep) {
  // f = 1/2 |x|^2 and a coordinate sketch hitting a zero partial.
  const Quadratic oracle(Eigen::MatrixXd::Identity(2, 2),
                         Eigen::VectorXd::Zero(2));
  SolverState state;
  state.x = Eigen::Vector2d(0.0, 1.0);
  Eigen::MatrixXd s(2, 1);
  s << 1, 0;
  SolverConfig config;
  config.constants.l_alg = 1.0;
  const StepReport report = sgn_step(oracle, state, {s, 1}, config);
  EXPECT_EQ(report.new_x, state.x);
  EXPECT_EQ(report.alpha, 1.0);
  EXPECT_EQ(report.sketched_dual_norm, 0.0);
}

TEST(SgnStep, MatchesBruteForceModelMinimizer) {
  const LogisticRegression oracle = make_logistic(60, 8, 5.0, 31);
  for (int i = 0; i < 20; ++i) {
    CounterRng rng(3, i);
    SolverState state;
    state.x = random_vector(8, rng, 0.5);
    const SketchMatrix sketch =
        sample(SketchDistribution::gaussian(8, 1, 7), i);
    SolverConfig config;
    config.constants.l_alg = 2.0;
    const StepReport report = sgn_step(oracle, state, sketch, config);
    const Eigen::VectorXd brute = state.x +
        sketch.matrix *
            sgn::brute_model_argmin(oracle, state.x, sketch, 2.0);
    EXPECT_LE((report.new_x - brute).norm(), 1e-6 * (1.0 + brute.norm()));
  }
}

TEST(SgnStep, StepLengthIdentity) {
  const LogisticRegression oracle = make_logistic(60, 8, 5.0, 32);
  for (int i = 0; i < 50; ++i) {
    CounterRng rng(4, i);
    SolverState state;
    state.x = random_vector(8, rng, 0.5);
    const SketchMatrix sketch = sample(
        SketchDistribution::coordinate(8, 1 + i % 3, 9), i);
    SolverConfig config;
    config.constants.l_alg = 1.0 + i % 4;
    const StepReport report = sgn_step(oracle, state, sketch, config);
    const GeometryContext ctx(oracle.hessian(state.x));
    const double step_length = local_norm(ctx, report.new_x - state.x);
    const double expected = report.alpha * report.sketched_dual_norm;
    EXPECT_NEAR(step_length, expected, 1e-10 * (1.0 + expected));
  }
}

TEST(SgnStep, SketchedRangeViolationThrows) {
  const OutOfRangeOracle oracle;
  SolverState state;
  state.x = Eigen::Vector2d(0, 0);
  SolverConfig config;
  config.constants.l_alg = 1.0;
  Eigen::MatrixXd s(2, 1);
  s << 0, 1;  // sketched Hessian is 0, sketched gradient is 1
  EXPECT_THROW(sgn_step(oracle, state, {s, 1}, config), sgn::RangeViolation);
}

TEST(SapForm, AgreesOnRandomQuadratics) {
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    CounterRng rng(5, i);
    const int d = 5 + i % 4;
    const Quadratic oracle(random_spd(d, 0.4, 4.0, rng),
                           random_vector(d, rng));
    SolverState state;
    state.x = random_vector(d, rng);
    const SketchMatrix sketch =
        sample(SketchDistribution::gaussian(d, 2, 11), i);
    SolverConfig config;
    config.constants.l_alg = 0.5;
    const StepReport damped = sgn_step(oracle, state, sketch, config);
    const StepReport projected =
        sgn_step_sap_form(oracle, state, sketch, config);
    worst = std::max(worst, (damped.new_x - projected.new_x).norm() /
                                (1.0 + damped.new_x.norm()));
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(SapForm, FullSketchMatchesFullDimensionalStep) {
  CounterRng rng(6);
  const int d = 5;
  const Quadratic oracle(random_spd(d, 0.5, 3.0, rng), random_vector(d, rng));
  SolverState state;
  state.x = random_vector(d, rng);
  SolverConfig config;
  config.constants.l_alg = 1.5;
  const StepReport projected =
      sgn_step_sap_form(oracle, state, identity_sketch(d), config);
  const StepReport full = aicn_step(oracle, state, 1.5);
  EXPECT_LE((projected.new_x - full.new_x).norm(), 1e-10);
}

TEST(SapForm, LogisticTrajectoriesCoincide) {
  const LogisticRegression oracle = make_logistic(120, 20, 5.0, 33);
  const auto dist = SketchDistribution::coordinate(20, 1, 13);
  SolverConfig config;
  config.constants.l_alg = semi_strong_bound(oracle);
  SolverState damped, projected;
  damped.x = Eigen::VectorXd::Zero(20);
  projected.x = damped.x;
  for (int k = 0; k < 50; ++k) {
    const SketchMatrix sketch = sample(dist, k);
    damped.x = sgn_step(oracle, damped, sketch, config).new_x;
    projected.x = sgn_step_sap_form(oracle, projected, sketch, config).new_x;
    ASSERT_LE((damped.x - projected.x).norm(), 1e-7 * (1.0 + damped.x.norm()));
  }
}

TEST(ModelValue, ZeroStepAndQuadraticTaylor) {
  CounterRng rng(7);
  const int d = 5;
  const Quadratic oracle(random_spd(d, 0.5, 3.0, rng), random_vector(d, rng));
  const Eigen::VectorXd x = random_vector(d, rng);
  const SketchMatrix sketch = sample(SketchDistribution::gaussian(d, 2, 15), 0);
  EXPECT_EQ(model_value(oracle, x, sketch, Eigen::VectorXd::Zero(2), 3.0),
            oracle.value(x));
  // With no cubic term the model is the function restriction of a quadratic.
  const Eigen::VectorXd h = random_vector(2, rng);
  EXPECT_NEAR(model_value(oracle, x, sketch, h, 0.0),
              oracle.value(x + sketch.matrix * h), 1e-10);
}

TEST(ModelValue, SgnStepDecreasesTheModel) {
  const LogisticRegression oracle = make_logistic(60, 8, 5.0, 34);
  for (int i = 0; i < 20; ++i) {
    CounterRng rng(8, i);
    SolverState state;
    state.x = random_vector(8, rng, 0.5);
    const SketchMatrix sketch =
        sample(SketchDistribution::gaussian(8, 2, 17), i);
    SolverConfig config;
    config.constants.l_alg = 1.0;
    const StepReport report = sgn_step(oracle, state, sketch, config);
    EXPECT_GE(report.model_decrease, -1e-12);
  }
}

TEST(RsnStep, FixedStepsizeExamples) {
  CounterRng rng(9);
  const int d = 5;
  const Quadratic oracle(random_spd(d, 0.5, 3.0, rng), random_vector(d, rng));
  SolverState state;
  state.x = random_vector(d, rng);
  const StepReport unit = rsn_step(oracle, state, identity_sketch(d), 1.0);
  EXPECT_LE((unit.new_x - oracle.minimizer()).norm(), 1e-10);
  const StepReport half = rsn_step(oracle, state, identity_sketch(d), 2.0);
  EXPECT_TRUE(((half.new_x - state.x) * 2.0)
                  .isApprox(unit.new_x - state.x, 1e-12));

  // Same direction as the damped step, different magnitude.
  const SketchMatrix sketch = sample(SketchDistribution::gaussian(d, 1, 19), 0);
  SolverConfig config;
  config.constants.l_alg = 2.0;
  const Eigen::VectorXd damped_dir =
      (sgn_step(oracle, state, sketch, config).new_x - state.x).normalized();
  const Eigen::VectorXd rsn_dir =
      (rsn_step(oracle, state, sketch, 3.0).new_x - state.x).normalized();
  EXPECT_LE((damped_dir - rsn_dir).norm(), 1e-10);
}

TEST(AicnStep, BitwiseEqualToFullSketchSgn) {
  CounterRng rng(10);
  const int d = 6;
  const Quadratic oracle(random_spd(d, 0.5, 3.0, rng), random_vector(d, rng));
  SolverState state;
  state.x = random_vector(d, rng);
  SolverConfig config;
  config.constants.l_alg = 0.7;
  const StepReport via_sgn = sgn_step(oracle, state, identity_sketch(d), config);
  const StepReport via_aicn = aicn_step(oracle, state, 0.7);
  EXPECT_EQ(via_sgn.new_x, via_aicn.new_x);
  EXPECT_EQ(via_sgn.alpha, via_aicn.alpha);

  // The stepsize is driven by the full dual gradient norm.
  const GeometryContext ctx(oracle.hessian(state.x));
  EXPECT_NEAR(via_aicn.sketched_dual_norm,
              dual_norm(ctx, oracle.gradient(state.x)), 1e-12);
}

TEST(AicnStep, RequiresFullRankHessian) {
  const OutOfRangeOracle oracle;
  SolverState state;
  state.x = Eigen::Vector2d(0, 0);
  EXPECT_THROW(aicn_step(oracle, state, 1.0), std::invalid_argument);
}

TEST(SscnStep, ScalarFixedPoint) {
  // g = 1, curvature 1, cubic constant 2: radius is the golden ratio root.
  Eigen::VectorXd g(1);
  g << 1.0;
  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  const sgn::SscnSubproblem sub = sgn::solve_sscn_subproblem(g, one, one, 2.0);
  EXPECT_NEAR(sub.radius, (std::sqrt(5.0) - 1.0) / 2.0, 1e-10);
  EXPECT_NEAR(sub.h[0], -sub.radius, 1e-10);
}

TEST(SscnStep, VanishingRegularizerIsSubspaceNewton) {
  CounterRng rng(11);
  const int d = 6;
  const Quadratic oracle(random_spd(d, 0.5, 3.0, rng), random_vector(d, rng));
  SolverState state;
  state.x = random_vector(d, rng);
  const SketchMatrix sketch = sample(SketchDistribution::gaussian(d, 2, 21), 0);
  const StepReport cubic = sscn_step(oracle, state, sketch, 1e-12);
  const StepReport newton = rsn_step(oracle, state, sketch, 1.0);
  EXPECT_LE((cubic.new_x - newton.new_x).norm(), 1e-8);
}

TEST(SscnStep, StationarityResidual) {
  for (int i = 0; i < 100; ++i) {
    CounterRng rng(12, i);
    const int tau = 1 + i % 3;
    const Eigen::MatrixXd q = random_spd(tau, 0.3, 3.0, rng);
    Eigen::MatrixXd s(6, tau);
    for (int j = 0; j < tau; ++j) s.col(j) = random_vector(6, rng) / 2.0;
    const Eigen::MatrixXd gram = s.transpose() * s;
    const Eigen::VectorXd g = random_vector(tau, rng).normalized();
    const double l_s = 0.5 + 2.0 * rng.uniform();
    const sgn::SscnSubproblem sub = sgn::solve_sscn_subproblem(g, q, gram, l_s);
    const double residual =
        (g + q * sub.h + 0.5 * l_s * sub.radius * gram * sub.h).norm();
    EXPECT_LE(residual, 1e-8);
  }
}

TEST(NewtonExactDescent, Examples) {
  CounterRng rng(13);
  const int d = 5;
  const Quadratic oracle(random_spd(d, 0.5, 3.0, rng), random_vector(d, rng));
  SolverState state;
  state.x = random_vector(d, rng);
  const StepReport full = newton_exact_descent_step(oracle, state, 1.0);
  EXPECT_LE((full.new_x - oracle.minimizer()).norm(), 1e-10);
  const StepReport half = newton_exact_descent_step(oracle, state, 2.0);
  EXPECT_TRUE(((half.new_x - state.x) * 2.0)
                  .isApprox(full.new_x - state.x, 1e-12));
  const Eigen::VectorXd newton_dir = (full.new_x - state.x).normalized();
  const Eigen::VectorXd aicn_dir =
      (aicn_step(oracle, state, 1.0).new_x - state.x).normalized();
  EXPECT_LE((newton_dir - aicn_dir).norm(), 1e-10);
  EXPECT_THROW(newton_exact_descent_step(oracle, state, 0.0),
               std::invalid_argument);
}

TEST(CoordinateDescent, SeparableQuadraticSolvesCoordinate) {
  Eigen::VectorXd diag(3);
  diag << 1.0, 2.0, 5.0;
  const Quadratic oracle(diag.asDiagonal().toDenseMatrix(),
                         Eigen::Vector3d(1, 1, 1));
  SolverState state;
  state.x = Eigen::Vector3d(2, 2, 2);
  Eigen::MatrixXd e1 = Eigen::MatrixXd::Zero(3, 1);
  e1(0, 0) = 1.0;
  const StepReport report =
      coordinate_descent_step(oracle, state, diag, {e1, 1});
  EXPECT_NEAR(oracle.gradient(report.new_x)[0], 0.0, 1e-14);
  EXPECT_EQ(report.new_x[1], 2.0);
  EXPECT_EQ(report.new_x[2], 2.0);
}

TEST(CoordinateDescent, OneDimensionIsGradientDescent) {
  Eigen::MatrixXd a(1, 1);
  a << 4.0;
  const Quadratic oracle(a, Eigen::VectorXd::Constant(1, 2.0));
  SolverState state;
  state.x = Eigen::VectorXd::Constant(1, 3.0);
  Eigen::VectorXd lips(1);
  lips << 4.0;
  const StepReport report = coordinate_descent_step(
      oracle, state, lips, {Eigen::MatrixXd::Identity(1, 1), 1});
  EXPECT_NEAR(report.new_x[0], 3.0 - oracle.gradient(state.x)[0] / 4.0, 1e-14);
}

TEST(CoordinateDescent, MonotoneWithValidBounds) {
  const LogisticRegression oracle = make_logistic(60, 6, 5.0, 35);
  SolverConfig config;
  config.algorithm = Algorithm::kCoordinateDescent;
  config.distribution = SketchDistribution::coordinate(6, 1, 23);
  config.coord_lipschitz = oracle.coordinate_lipschitz();
  config.max_iters = 200;
  config.stop_g_dual = 0;
  const RunResult result =
      run(oracle, config, Eigen::VectorXd::Zero(6));
  for (std::size_t k = 0; k + 1 < result.trace.size(); ++k) {
    EXPECT_LE(result.trace[k + 1].f_value,
              result.trace[k].f_value + 1e-12);
  }
}

TEST(Run, QuadraticStopsAfterOneIteration) {
  CounterRng rng(14);
  const int d = 5;
  const Quadratic oracle(random_spd(d, 0.5, 3.0, rng), random_vector(d, rng));
  SolverConfig config;
  config.algorithm = Algorithm::kSgn;
  config.constants.l_alg = 1e-12;
  config.distribution = SketchDistribution::identity(d);
  config.max_iters = 50;
  const RunResult result = run(oracle, config, random_vector(d, rng));
  ASSERT_EQ(result.trace.size(), 2u);
  EXPECT_LE(result.trace.back().g_dual, 1e-10);
}

TEST(Run, TraceContractAndDeterminism) {
  const LogisticRegression oracle = make_logistic(60, 10, 5.0, 36);
  SolverConfig config;
  config.algorithm = Algorithm::kSgn;
  config.constants.l_alg = semi_strong_bound(oracle);
  config.distribution = SketchDistribution::coordinate(10, 1, 25);
  config.max_iters = 120;
  config.stop_g_dual = 0;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(10);
  const RunResult a = run(oracle, config, x0);
  const RunResult b = run(oracle, config, x0);
  ASSERT_EQ(a.trace.size(), 121u);
  ASSERT_EQ(b.trace.size(), a.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    EXPECT_EQ(a.trace[k].k, static_cast<int>(k));
    // Bit-identical runs; wall clock is the one nondeterministic column.
    EXPECT_EQ(a.trace[k].f_value, b.trace[k].f_value);
    EXPECT_EQ(a.trace[k].g_dual, b.trace[k].g_dual);
    EXPECT_EQ(a.trace[k].alpha, b.trace[k].alpha);
    EXPECT_EQ(a.trace[k].cost_dtau2, b.trace[k].cost_dtau2);
  }
}

TEST(Run, MonotoneTraceAndStepsizeBound) {
  const LogisticRegression oracle = make_logistic(80, 10, 10.0, 37);
  const double l_alg = semi_strong_bound(oracle);
  SolverConfig config;
  config.algorithm = Algorithm::kSgn;
  config.constants.l_alg = l_alg;
  config.distribution = SketchDistribution::coordinate(10, 2, 27);
  config.max_iters = 300;
  config.stop_g_dual = 0;
  const RunResult result = run(oracle, config, Eigen::VectorXd::Zero(10));
  for (std::size_t k = 0; k + 1 < result.trace.size(); ++k) {
    EXPECT_LE(result.trace[k + 1].f_value, result.trace[k].f_value + 1e-12);
    const double g = result.trace[k].g_dual;
    if (g > 0) {
      EXPECT_LE(result.trace[k].alpha,
                std::sqrt(2.0 / (l_alg * g)) * (1.0 + 1e-12));
    }
    EXPECT_GT(result.trace[k].alpha, 0.0);
    EXPECT_LE(result.trace[k].alpha, 1.0);
  }
}

TEST(Run, SubspaceGradientDecreaseAlongTrajectory) {
  // One step contracts the sketched dual gradient quadratically when the
  // stepsize constant dominates the semi-strong constant.
  const LogisticRegression oracle = make_logistic(60, 8, 5.0, 38);
  const double l_alg = semi_strong_bound(oracle);
  const auto dist = SketchDistribution::coordinate(8, 2, 29);
  SolverConfig config;
  config.algorithm = Algorithm::kSgn;
  config.constants.l_alg = l_alg;
  config.distribution = dist;
  config.max_iters = 150;
  config.stop_g_dual = 0;
  config.record_iterates = true;
  const RunResult result = run(oracle, config, Eigen::VectorXd::Zero(8));
  for (std::size_t k = 0; k + 1 < result.iterates.size(); ++k) {
    const SketchMatrix sketch = sample(dist, k);
    const Eigen::VectorXd g_next =
        oracle.sketched_gradient(result.iterates[k + 1], sketch.matrix);
    // Dual norm taken at the pre-step iterate in the same subspace.
    const GeometryContext sub(
        oracle.sketched_hessian(result.iterates[k], sketch.matrix));
    const double lhs = dual_norm(sub, g_next);
    const double g = result.trace[k].g_dual;
    const double alpha = result.trace[k].alpha;
    EXPECT_LE(lhs, l_alg * alpha * alpha * g * g + 1e-12);
  }
}

TEST(Run, StepLengthIdentityFromLoggedColumns) {
  const LogisticRegression oracle = make_logistic(60, 8, 5.0, 39);
  SolverConfig config;
  config.algorithm = Algorithm::kSgn;
  config.constants.l_alg = 3.0;
  config.distribution = SketchDistribution::gaussian(8, 2, 31);
  config.max_iters = 80;
  config.stop_g_dual = 0;
  config.record_iterates = true;
  const RunResult result = run(oracle, config, Eigen::VectorXd::Zero(8));
  for (std::size_t k = 0; k + 1 < result.iterates.size(); ++k) {
    const GeometryContext ctx(oracle.hessian(result.iterates[k]));
    const double length =
        local_norm(ctx, result.iterates[k + 1] - result.iterates[k]);
    const double expected =
        result.trace[k].alpha * result.trace[k].g_dual;
    EXPECT_NEAR(length, expected, 1e-10 * (1.0 + expected));
  }
}

TEST(Run, SuboptimalityStop) {
  CounterRng rng(15);
  const int d = 6;
  const Quadratic oracle(random_spd(d, 0.5, 3.0, rng), random_vector(d, rng));
  SolverConfig config;
  config.algorithm = Algorithm::kSgn;
  config.constants.l_alg = 1.0;
  config.distribution = SketchDistribution::coordinate(d, 1, 33);
  config.max_iters = 100000;
  config.stop_g_dual = 0;
  config.f_star = oracle.minimum();
  config.stop_subopt = 1e-6;
  const RunResult result = run(oracle, config, random_vector(d, rng));
  EXPECT_LE(result.trace.back().f_value - oracle.minimum(), 1e-6);
  EXPECT_LT(result.trace.back().k, 100000);
}

TEST(Run, ErrorsCarryIterationIndex) {
  const OutOfRangeOracle oracle;
  SolverConfig config;
  config.algorithm = Algorithm::kNewtonExactDescent;
  config.sigma = 1.0;
  config.max_iters = 5;
  try {
    run(oracle, config, Eigen::Vector2d(0, 0));
    FAIL() << "expected a range violation";
  } catch (const std::runtime_error& error) {
    EXPECT_NE(std::string(error.what()).find("iteration 0"), std::string::npos)
        << error.what();
  }
}

TEST(Run, ConfigValidation) {
  CounterRng rng(16);
  const Quadratic oracle(random_spd(3, 0.5, 2.0, rng), random_vector(3, rng));
  SolverConfig config;
  config.algorithm = Algorithm::kSgn;
  config.constants.l_alg = 0.0;  // invalid
  config.distribution = SketchDistribution::identity(3);
  EXPECT_THROW(run(oracle, config, Eigen::Vector3d(0, 0, 0)),
               std::invalid_argument);
  config.constants.l_alg = 1.0;
  config.distribution.reset();
  EXPECT_THROW(run(oracle, config, Eigen::Vector3d(0, 0, 0)),
               std::invalid_argument);
}

TEST(Run, AffineInvarianceShort) {
  const LogisticRegression oracle = make_logistic(50, 6, 5.0, 40);
  const double l_alg = semi_strong_bound(oracle);
  const auto dist = SketchDistribution::coordinate(6, 1, 35);
  CounterRng rng(17);
  Eigen::VectorXd scales(6);
  for (int j = 0; j < 6; ++j) scales[j] = 0.8 + 0.4 * rng.uniform();
  const Eigen::MatrixXd map =
      sgn::testing::random_orthogonal(6, rng) * scales.asDiagonal();
  const Eigen::MatrixXd inverse_map = map.inverse();

  SolverConfig config;
  config.algorithm = Algorithm::kSgn;
  config.constants.l_alg = l_alg;
  config.distribution = dist;
  config.max_iters = 30;
  config.stop_g_dual = 0;
  config.record_iterates = true;
  const Eigen::VectorXd x0 = random_vector(6, rng, 0.2);
  const RunResult direct = run(oracle, config, x0);

  const sgn::AffinePullback pulled(oracle, map);
  SolverConfig mapped = config;
  mapped.sketch_provider = [&](std::uint64_t k) -> SketchMatrix {
    const SketchMatrix s = sample(dist, k);
    return {inverse_map * s.matrix, s.rank};
  };
  const RunResult transformed = run(pulled, mapped, inverse_map * x0);
  for (std::size_t k = 0; k < direct.iterates.size(); ++k) {
    EXPECT_LE((direct.iterates[k] - map * transformed.iterates[k]).norm(),
              1e-7 * (1.0 + direct.iterates[k].norm()));
  }
}

TEST(AlgorithmNames, RoundTrip) {
  for (const auto algorithm :
       {Algorithm::kSgn, Algorithm::kRsn, Algorithm::kAicn, Algorithm::kSscn,
        Algorithm::kNewtonExactDescent, Algorithm::kCoordinateDescent}) {
    EXPECT_EQ(sgn::algorithm_from_name(sgn::algorithm_name(algorithm)),
              algorithm);
  }
  EXPECT_THROW(sgn::algorithm_from_name("sketchy"), std::invalid_argument);
}
