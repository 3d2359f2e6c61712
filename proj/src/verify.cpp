#include "sgn/verify.hpp"

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <future>
#include <sstream>
#include <thread>

#include "sgn/data_io.hpp"
#include "sgn/harness.hpp"
#include "sgn/objectives.hpp"
#include "sgn/rng.hpp"
#include "sgn/solvers.hpp"
#include "sgn/validation.hpp"

namespace sgn::verify {

namespace {

Eigen::VectorXd random_vector(int d, CounterRng& rng, double scale = 1.0) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = scale * rng.normal();
  return v;
}

Eigen::MatrixXd random_orthogonal(int d, CounterRng& rng) {
  Eigen::MatrixXd g(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) g(i, j) = rng.normal();
  }
  return Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
}

// Symmetric with eigenvalues log-uniform in [lo, hi]; lo = 0 plants a
// null direction.
Eigen::MatrixXd random_spd(int d, double lo, double hi, CounterRng& rng) {
  const Eigen::MatrixXd q = random_orthogonal(d, rng);
  Eigen::VectorXd eigs(d);
  for (int i = 0; i < d; ++i) {
    eigs[i] = lo == 0.0 && i == 0
                  ? 0.0
                  : std::exp(std::log(std::max(lo, 1e-12)) +
                             rng.uniform() * (std::log(hi) -
                                              std::log(std::max(lo, 1e-12))));
  }
  return q * eigs.asDiagonal() * q.transpose();
}

double deviation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / (1.0 + a.norm());
}

std::string format(double v) {
  std::ostringstream out;
  out.precision(3);
  out << v;
  return out.str();
}

struct EnvelopeInstance {
  std::shared_ptr<LogisticRegression> oracle;
  SketchDistribution dist;
  double l_alg = 0;   // closed-form semi-strong upper bound
  double f_star = 0;
  Eigen::VectorXd x_star;
};

// The d=20 synthetic instance shared by the envelope and local-rate checks.
EnvelopeInstance envelope_instance() {
  EnvelopeInstance inst{std::make_shared<LogisticRegression>(
                            synth_logistic(400, 20, 10.0, 20250810u), 1e-2),
                        SketchDistribution::coordinate(20, 1, 7u), 0, 0, {}};
  inst.l_alg = estimate_semi_strong(inst.oracle->hessian_lipschitz_l2(),
                                    inst.oracle->strong_convexity());
  const FStarResult ref = compute_fstar(*inst.oracle, 1e-12, 10000, 1e-8);
  inst.f_star = ref.f_star;
  inst.x_star = ref.minimizer;
  return inst;
}

// Replications of run() with per-replication seed streams, in parallel.
std::vector<RunResult> replicate(const ObjectiveOracle& oracle,
                                 const SolverConfig& base,
                                 const Eigen::VectorXd& x0, int reps,
                                 std::uint64_t seed) {
  std::vector<RunResult> results(reps);
  std::atomic<int> next{0};
  const unsigned workers = std::max(
      1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                             static_cast<unsigned>(reps)));
  std::vector<std::future<void>> futures;
  for (unsigned w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&] {
      for (int rep = next++; rep < reps; rep = next++) {
        SolverConfig config = base;
        config.distribution = config.distribution->with_seed(
            CounterRng::derive(seed, static_cast<std::uint64_t>(rep)));
        results[rep] = run(oracle, config, x0);
      }
    }));
  }
  for (auto& f : futures) f.get();
  return results;
}

}  // namespace

CriterionResult update_forms_equivalence() {
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    CounterRng rng(0x51u, i);
    const int d = i % 4 < 2 ? 5 : 20;
    const int tau = 1 + (i / 4) % 2;
    std::unique_ptr<ObjectiveOracle> oracle;
    if (i % 2 == 0) {
      oracle = std::make_unique<Quadratic>(random_spd(d, 0.4, 4.0, rng),
                                           random_vector(d, rng));
    } else {
      Dataset data = synth_logistic(8 * d, d, 5.0, 1000u + i);
      const double reg = LogisticRegression::default_regularization(data);
      oracle = std::make_unique<LogisticRegression>(std::move(data), reg);
    }
    const Eigen::VectorXd x = random_vector(d, rng, 0.5);
    const SketchDistribution dist =
        i % 3 == 0 ? SketchDistribution::coordinate(d, tau, 33u + i)
                   : SketchDistribution::gaussian(d, tau, 33u + i);
    const SketchMatrix sketch = sample(dist, 0);

    SolverConfig config;
    config.constants.l_alg = 1.0;
    SolverState state;
    state.x = x;
    const StepReport damped = sgn_step(*oracle, state, sketch, config);
    const StepReport projected =
        sgn_step_sap_form(*oracle, state, sketch, config);
    const Eigen::VectorXd brute =
        x + sketch.matrix *
                brute_model_argmin(*oracle, x, sketch, 1.0, 41, 400);
    worst = std::max(worst, deviation(damped.new_x, projected.new_x));
    worst = std::max(worst, deviation(damped.new_x, brute));
  }
  return {"update_forms_equivalence", worst <= 1e-6,
          "max iterate deviation " + format(worst) + " over 100 instances"};
}

CriterionResult stepsize_correctness() {
  CounterRng rng(0x52u);
  double worst_residual = 0;
  bool in_range = true;
  bool bounded = true;
  for (int i = 0; i < 10000; ++i) {
    const double l = std::pow(10.0, -8.0 + 14.0 * rng.uniform());
    const double g = std::pow(10.0, -8.0 + 14.0 * rng.uniform());
    const double a = sgn_stepsize(l, g);
    worst_residual =
        std::max(worst_residual, std::abs(1.0 - a - 0.5 * l * g * a * a));
    in_range = in_range && a > 0 && a <= 1.0;
    bounded = bounded && a <= std::sqrt(2.0 / (l * g)) * (1.0 + 1e-12);
  }
  const double spot_half = std::abs(sgn_stepsize(2.0, 2.0) - 0.5);
  const double spot_third = std::abs(sgn_stepsize(3.0, 4.0) - 1.0 / 3.0);
  const bool pass = worst_residual <= 1e-12 && in_range && bounded &&
                    spot_half <= 1e-15 && spot_third <= 1e-15;
  return {"stepsize_correctness", pass,
          "max root residual " + format(worst_residual) +
              ", spot errors " + format(spot_half) + " / " +
              format(spot_third)};
}

CriterionResult projection_suite() {
  double worst_idem = 0;
  double worst_pythagoras = 0;
  for (int i = 0; i < 1000; ++i) {
    CounterRng rng(0x53u, i);
    const int d = 6 + i % 5;
    const int tau = 1 + i % 3;
    const GeometryContext ctx(random_spd(d, 0.3, 3.0, rng));
    const SketchDistribution dist =
        i % 2 == 0 ? SketchDistribution::coordinate(d, tau, 0x53u)
                   : SketchDistribution::gaussian(d, tau, 0x53u);
    const Eigen::MatrixXd s = sample(dist, static_cast<std::uint64_t>(i)).matrix;
    const ProjectionOperator proj(ctx, s);
    const Eigen::MatrixXd& p = proj.matrix();
    worst_idem = std::max(worst_idem, (p * p - p).cwiseAbs().maxCoeff());
    const Eigen::VectorXd h = random_vector(d, rng);
    const Eigen::VectorXd ph = proj.apply(h);
    const double nh = local_norm(ctx, h);
    const double nph = local_norm(ctx, ph);
    const double nres = local_norm(ctx, h - ph);
    worst_pythagoras =
        std::max(worst_pythagoras,
                 std::abs(nph * nph + nres * nres - nh * nh) /
                     std::max(1.0, nh * nh));
  }
  if (worst_idem > 1e-10 || worst_pythagoras > 1e-10) {
    return {"projection_suite", false,
            "idempotency " + format(worst_idem) + ", pythagoras " +
                format(worst_pythagoras)};
  }

  // Whitened sketches: mean projection and the quadratic/cubic contractions.
  const int d = 10, tau = 2, samples = 100000;
  CounterRng rng(0x54u);
  const GeometryContext ctx(random_spd(d, 0.3, 3.0, rng));
  const SketchDistribution wdist =
      whiten(SketchDistribution::coordinate(d, tau, 77u), ctx);
  const double ratio = static_cast<double>(tau) / d;
  const Eigen::VectorXd h = random_vector(d, rng);
  const Eigen::VectorXd g = random_vector(d, rng);
  const double nh2 = std::pow(local_norm(ctx, h), 2);
  const double nh3 = std::pow(local_norm(ctx, h), 3);
  const double ng2 = std::pow(dual_norm(ctx, g), 2);

  const McExpectation mean_p = mc_expectation(
      [&](CounterRng& r) -> Eigen::MatrixXd {
        return projection(ctx, sample(wdist, r).matrix).matrix();
      },
      samples, 0x55u);
  const double mean_dev =
      (mean_p.mean - ratio * Eigen::MatrixXd::Identity(d, d)).norm();

  const McExpectation quad_h = mc_expectation(
      [&](CounterRng& r) -> Eigen::MatrixXd {
        const ProjectionOperator proj(ctx, sample(wdist, r).matrix);
        Eigen::MatrixXd out(1, 1);
        out(0, 0) = std::pow(local_norm(ctx, proj.apply(h)), 2);
        return out;
      },
      samples, 0x56u);
  const double gap_h = std::abs(quad_h.mean(0, 0) - ratio * nh2);

  const McExpectation quad_g = mc_expectation(
      [&](CounterRng& r) -> Eigen::MatrixXd {
        const ProjectionOperator proj(ctx, sample(wdist, r).matrix);
        Eigen::MatrixXd out(1, 1);
        out(0, 0) = std::pow(dual_norm(ctx, proj.apply_transpose(g)), 2);
        return out;
      },
      samples, 0x57u);
  const double gap_g = std::abs(quad_g.mean(0, 0) - ratio * ng2);

  const McExpectation cube_h = mc_expectation(
      [&](CounterRng& r) -> Eigen::MatrixXd {
        const ProjectionOperator proj(ctx, sample(wdist, r).matrix);
        Eigen::MatrixXd out(1, 1);
        out(0, 0) = std::pow(local_norm(ctx, proj.apply(h)), 3);
        return out;
      },
      samples, 0x58u);
  const double cube_excess = cube_h.mean(0, 0) - ratio * nh3;

  const bool pass = mean_dev <= 0.02 &&
                    gap_h <= 3.0 * quad_h.standard_error(0, 0) &&
                    gap_g <= 3.0 * quad_g.standard_error(0, 0) &&
                    cube_excess <= 3.0 * cube_h.standard_error(0, 0);
  return {"projection_suite", pass,
          "idempotency " + format(worst_idem) + ", pythagoras " +
              format(worst_pythagoras) + ", |mean P - 0.2 I| " +
              format(mean_dev) + ", contraction gaps " + format(gap_h) + "/" +
              format(gap_g) + "/" + format(cube_excess)};
}

CriterionResult monotone_and_one_step_decrease() {
  struct RunCase {
    std::shared_ptr<ObjectiveOracle> oracle;
    double l_alg;
    SketchDistribution dist;
    Eigen::VectorXd x0;
  };
  std::vector<RunCase> cases;

  {
    Dataset data = synth_logistic(80, 10, 10.0, 404u);
    const double lambda = LogisticRegression::default_regularization(data);
    auto logistic =
        std::make_shared<LogisticRegression>(std::move(data), lambda);
    const double l_alg = estimate_semi_strong(
        logistic->hessian_lipschitz_l2(), logistic->strong_convexity());
    CounterRng rng(0x60u);
    cases.push_back({logistic, l_alg,
                     SketchDistribution::coordinate(10, 1, 11u),
                     random_vector(10, rng, 0.5)});
    cases.push_back({logistic, l_alg,
                     SketchDistribution::coordinate(10, 2, 12u),
                     random_vector(10, rng, 0.5)});
    cases.push_back({logistic, l_alg, SketchDistribution::gaussian(10, 1, 13u),
                     random_vector(10, rng, 0.5)});
  }
  {
    CounterRng rng(0x61u);
    const int d = 5, m = 12;
    Eigen::MatrixXd rows(m, d);
    for (int i = 0; i < m; ++i) rows.row(i) = random_vector(d, rng, 0.8);
    auto lse = std::make_shared<LogSumExp>(rows, random_vector(m, rng, 0.3),
                                           1.0);
    const ProbeRegion region{Eigen::VectorXd::Zero(d), 2.5};
    const double l2 = empirical_hessian_lipschitz(*lse, 2000, region, 0x62u);
    const double mu = empirical_strong_convexity(*lse, 2000, region, 0x63u);
    const double l_alg = estimate_semi_strong(l2, mu);
    cases.push_back({lse, l_alg, SketchDistribution::coordinate(d, 1, 14u),
                     random_vector(d, rng, 0.3)});
    cases.push_back({lse, l_alg, SketchDistribution::gaussian(d, 2, 15u),
                     random_vector(d, rng, 0.3)});
  }

  double worst_monotone = 0;  // most positive f increase
  double worst_decrease_gap = 0;     // most violated decrease bound
  for (const RunCase& run_case : cases) {
    SolverConfig config;
    config.algorithm = Algorithm::kSgn;
    config.constants.l_alg = run_case.l_alg;
    config.distribution = run_case.dist;
    config.max_iters = 500;
    config.stop_g_dual = 0;
    const RunResult result = run(*run_case.oracle, config, run_case.x0);
    for (std::size_t k = 0; k + 1 < result.trace.size(); ++k) {
      const double drop =
          result.trace[k].f_value - result.trace[k + 1].f_value;
      worst_monotone = std::max(worst_monotone, -drop);
      const double g = result.trace[k].g_dual;
      const double rhs =
          0.5 *
          std::min(g > 0 ? 1.0 / std::sqrt(run_case.l_alg * g) : 0.5, 0.5) * g * g;
      worst_decrease_gap = std::max(worst_decrease_gap, rhs - drop);
    }
  }
  const bool pass = worst_monotone <= 1e-12 && worst_decrease_gap <= 1e-12;
  return {"monotone_and_one_step_decrease", pass,
          "worst increase " + format(worst_monotone) +
              ", worst decrease-bound gap " + format(worst_decrease_gap) +
              " over 5 runs x 500 iterations"};
}

CriterionResult global_envelope() {
  const EnvelopeInstance inst = envelope_instance();
  const int d = inst.oracle->dimension();
  const int tau = 1;
  const int reps = 50;
  const int iters = 2000;

  SolverConfig base;
  base.algorithm = Algorithm::kSgn;
  base.constants.l_alg = inst.l_alg;
  base.distribution = inst.dist;
  base.max_iters = iters;
  base.stop_g_dual = 0;
  base.record_iterates = true;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(d);
  const std::vector<RunResult> runs =
      replicate(*inst.oracle, base, x0, reps, 0x65u);

  double r_hat = 0;
  std::vector<double> mean_subopt(iters + 1, 0.0);
  for (const RunResult& result : runs) {
    for (int k = 0; k <= iters; ++k) {
      mean_subopt[k] +=
          clamp_subopt(result.trace[k].f_value - inst.f_star) / reps;
      const Eigen::VectorXd gap = result.iterates[k] - inst.x_star;
      r_hat = std::max(r_hat, std::sqrt(std::max(
                                  inst.oracle->hessian_quadratic_form(
                                      result.iterates[k], gap),
                                  0.0)));
    }
  }
  const double delta0 = inst.oracle->value(x0) - inst.f_star;

  SmoothnessEstimates constants;
  constants.l_semi = inst.l_alg;
  constants.l_s_sup = empirical_ls(
      *inst.oracle, inst.dist, 500,
      ProbeRegion{inst.x_star, 0.5 * (x0 - inst.x_star).norm() + 0.5}, 0x66u);
  const std::vector<bool> ok =
      check_global_envelope(mean_subopt, constants, r_hat, delta0, tau, d);
  int violations = 0;
  for (const bool v : ok) violations += v ? 0 : 1;
  return {"global_envelope", violations == 0,
          std::to_string(violations) + " of " + std::to_string(ok.size()) +
              " iterations above the bound (R_hat " + format(r_hat) +
              ", delta0 " + format(delta0) + ")"};
}

CriterionResult local_linear_envelope() {
  const EnvelopeInstance inst = envelope_instance();
  const int d = inst.oracle->dimension();
  const int tau = 1;
  const int reps = 200;
  const int iters = 300;

  // Warm start pulled toward the optimum until it clears the neighborhood
  // gate with margin.
  CounterRng rng(0x67u);
  const Eigen::VectorXd direction = random_vector(d, rng).normalized();
  const double gate_l = inst.l_alg;  // conservative self-concordance bound
  double eps = 1.0;
  Eigen::VectorXd warm;
  for (int halving = 0; halving < 200; ++halving) {
    warm = inst.x_star + eps * direction;
    const double gnorm =
        dual_norm(GeometryContext(inst.oracle->hessian(warm)),
                  inst.oracle->gradient(warm));
    if (gnorm < 0.4 / gate_l) break;
    eps *= 0.5;
  }
  if (!neighborhood_check(*inst.oracle, warm, gate_l, 1.0)) {
    return {"local_linear_envelope", false,
            "warm start failed the neighborhood gate"};
  }

  SolverConfig base;
  base.algorithm = Algorithm::kSgn;
  base.constants.l_alg = inst.l_alg;
  base.distribution = inst.dist;
  base.max_iters = iters;
  base.stop_g_dual = 0;
  const std::vector<RunResult> runs =
      replicate(*inst.oracle, base, warm, reps, 0x68u);
  std::vector<std::vector<double>> ensemble(reps);
  for (int rep = 0; rep < reps; ++rep) {
    for (const TraceRecord& r : runs[rep].trace) {
      ensemble[rep].push_back(clamp_subopt(r.f_value - inst.f_star));
    }
  }

  // Envelope constant from the rate proof; the self-concordance estimate is
  // an empirical lower bound, which only loosens the envelope.
  const double l_sc = empirical_ls(
      *inst.oracle, SketchDistribution::identity(d), 300,
      ProbeRegion{inst.x_star, 0.3}, 0x69u);
  const double b = local_linear_b(inst.l_alg, l_sc);
  const bool pass = check_local_linear(ensemble, tau, d, b);
  return {"local_linear_envelope", pass,
          "b " + format(b) + ", delta0 " + format(ensemble[0][0]) + ", " +
              std::to_string(reps) + " replications x " +
              std::to_string(iters) + " iterations"};
}

CriterionResult quadratic_one_step() {
  int solved = 0;
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    CounterRng rng(0x70u, i);
    const int d = 3 + i % 8;
    const Quadratic oracle(random_spd(d, 0.5, 4.0, rng),
                           random_vector(d, rng));
    SolverConfig config;
    config.algorithm = Algorithm::kSgn;
    config.constants.l_alg = 1e-12;
    config.distribution = SketchDistribution::identity(d);
    config.max_iters = 1;
    config.stop_g_dual = 0;
    const RunResult result = run(oracle, config, random_vector(d, rng));
    const double subopt = result.trace.back().f_value - oracle.minimum();
    worst = std::max(worst, subopt);
    if (result.trace.size() == 2 && subopt <= 1e-10) ++solved;
  }
  return {"quadratic_one_step", solved == 100,
          std::to_string(solved) + "/100 solved in one iteration, worst "
              "suboptimality " +
              format(worst)};
}

CriterionResult affine_invariance() {
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    CounterRng rng(0x71u, i);
    const int d = 10;
    Dataset data = synth_logistic(60, d, 5.0, 900u + i);
    const LogisticRegression oracle(
        data, LogisticRegression::default_regularization(data));
    const double l_alg = estimate_semi_strong(oracle.hessian_lipschitz_l2(),
                                              oracle.strong_convexity());
    // Well-conditioned reparameterization.
    Eigen::VectorXd scales(d);
    for (int j = 0; j < d; ++j) scales[j] = 0.8 + 0.45 * rng.uniform();
    const Eigen::MatrixXd map = random_orthogonal(d, rng) *
                                scales.asDiagonal() *
                                random_orthogonal(d, rng);
    const Eigen::MatrixXd inverse_map = map.inverse();
    const SketchDistribution dist =
        SketchDistribution::coordinate(d, 1, 500u + i);
    const Eigen::VectorXd x0 = random_vector(d, rng, 0.2);

    SolverConfig config;
    config.algorithm = Algorithm::kSgn;
    config.constants.l_alg = l_alg;
    config.distribution = dist;
    config.max_iters = 100;
    config.stop_g_dual = 0;
    config.record_iterates = true;
    const RunResult direct = run(oracle, config, x0);

    const AffinePullback pulled(oracle, map);
    SolverConfig mapped = config;
    mapped.sketch_provider = [&](std::uint64_t k) -> SketchMatrix {
      const SketchMatrix s = sample(dist, k);
      return {inverse_map * s.matrix, s.rank};
    };
    const RunResult transformed = run(pulled, mapped, inverse_map * x0);

    for (std::size_t k = 0; k < direct.iterates.size(); ++k) {
      worst = std::max(
          worst, deviation(direct.iterates[k], map * transformed.iterates[k]));
    }
  }
  return {"affine_invariance", worst <= 1e-7,
          "max trajectory deviation " + format(worst) +
              " over 20 instances x 100 steps"};
}

CriterionResult rho_sanity() {
  CounterRng rng(0x72u);
  const int d = 10;
  const Quadratic oracle(random_spd(d, 0.4, 4.0, rng), random_vector(d, rng));
  const Eigen::VectorXd x = random_vector(d, rng);
  const GeometryContext ctx(oracle.hessian(x));

  const double rho_identity = estimate_rho(
      oracle, x, SketchDistribution::identity(d), 64, 1e-12);
  const double rho_whitened = estimate_rho(
      oracle, x, whiten(SketchDistribution::coordinate(d, 1, 21u), ctx),
      200000, 1e-12);
  bool in_range = rho_identity > 0 && rho_identity <= 1.0 &&
                  rho_whitened > 0 && rho_whitened <= 1.0;
  for (int i = 0; i < 6 && in_range; ++i) {
    const SketchDistribution dist =
        i % 2 == 0 ? SketchDistribution::gaussian(d, 1 + i / 2, 60u + i)
                   : SketchDistribution::coordinate(d, 1 + i / 2, 60u + i);
    const double rho = estimate_rho(oracle, x, dist, 2000, 1.0);
    in_range = rho > 0 && rho <= 1.0;
  }
  const bool pass = in_range && std::abs(rho_identity - 1.0) <= 1e-9 &&
                    std::abs(rho_whitened - 0.1) <= 0.005;
  return {"rho_sanity", pass,
          "identity " + format(rho_identity) + ", whitened rank-1 " +
              format(rho_whitened) + " (target 0.1 +- 5%)"};
}

CriterionResult sscn_subsolver_and_comparability() {
  double worst_residual = 0;
  for (int i = 0; i < 1000; ++i) {
    CounterRng rng(0x73u, i);
    const int tau = 1 + i % 3;
    const Eigen::MatrixXd q = random_spd(tau, 0.3, 3.0, rng);
    Eigen::MatrixXd s(6, tau);
    for (int j = 0; j < tau; ++j) {
      s.col(j) = random_vector(6, rng) / std::sqrt(6.0);
    }
    const Eigen::MatrixXd gram = s.transpose() * s;
    const Eigen::VectorXd g = random_vector(tau, rng).normalized();
    const double l_s = std::pow(10.0, -0.7 + 1.4 * rng.uniform());
    const SscnSubproblem sub = solve_sscn_subproblem(g, q, gram, l_s);
    const double residual =
        (g + q * sub.h + 0.5 * l_s * sub.radius * gram * sub.h).norm();
    worst_residual = std::max(worst_residual, residual);
  }

  Eigen::VectorXd g1(1), one(1);
  g1 << 1.0;
  one << 1.0;
  const SscnSubproblem scalar = solve_sscn_subproblem(
      g1, one.asDiagonal().toDenseMatrix(), one.asDiagonal().toDenseMatrix(),
      2.0);
  const double golden_gap =
      std::abs(scalar.radius - (std::sqrt(5.0) - 1.0) / 2.0);

  // Comparable iteration counts on the default synthetic instance, both
  // tuned over their own constants with a shared seed.
  ExperimentConfig cfg;
  cfg.seed = 99;
  cfg.max_iters = 2500;
  cfg.out_dir = "acceptance_tmp";
  const ExperimentSetup setup = prepare_experiment(cfg);
  const double anchor_alg = setup.constants.l_semi;
  const double anchor_s = setup.oracle->hessian_lipschitz_l2();
  cfg.algorithm = "sgn";
  const double tuned_l_alg = tune_constant(
      cfg, {1e-6 * anchor_alg, 1e-4 * anchor_alg, 1e-2 * anchor_alg,
            anchor_alg},
      "l_alg");
  cfg.algorithm = "sscn";
  const double tuned_l_s = tune_constant(
      cfg, {1e-3 * anchor_s, 1e-1 * anchor_s, anchor_s, 10.0 * anchor_s},
      "l_s");

  const FStarResult ref = compute_fstar(*setup.oracle, 1e-12, 10000, 1e-8);
  const auto iterations_to_reach = [&](Algorithm algorithm,
                                       double constant) -> int {
    SolverConfig solver = setup.solver;
    solver.algorithm = algorithm;
    if (algorithm == Algorithm::kSgn) solver.constants.l_alg = constant;
    if (algorithm == Algorithm::kSscn) solver.l_s = constant;
    solver.f_star = ref.f_star;
    solver.stop_subopt = 1e-6;
    solver.stop_g_dual = 0;
    solver.max_iters = 30000;
    const RunResult result = run(*setup.oracle, solver, setup.x0);
    const TraceRecord& last = result.trace.back();
    if (last.f_value - ref.f_star > 1e-6) return -1;
    return last.k;
  };
  const int iters_sgn = iterations_to_reach(Algorithm::kSgn, tuned_l_alg);
  const int iters_sscn = iterations_to_reach(Algorithm::kSscn, tuned_l_s);
  const bool comparable = iters_sgn > 0 && iters_sscn > 0 &&
                          iters_sgn <= 2 * iters_sscn &&
                          iters_sscn <= 2 * iters_sgn;

  const bool pass =
      worst_residual <= 1e-8 && golden_gap <= 1e-10 && comparable;
  return {"sscn_subsolver_and_comparability", pass,
          "max stationarity residual " + format(worst_residual) +
              ", scalar radius error " + format(golden_gap) +
              ", iterations to 1e-6: sgn " + std::to_string(iters_sgn) +
              " vs sscn " + std::to_string(iters_sscn)};
}

CriterionResult libsvm_roundtrip() {
  int roundtrips = 0;
  for (int i = 0; i < 100; ++i) {
    CounterRng rng(0x74u, i);
    const int n = rng.uniform_int(40);
    const int d = 1 + rng.uniform_int(30);
    Dataset ds;
    ds.n = n;
    ds.d = d;
    ds.labels.resize(n);
    std::vector<Eigen::Triplet<double>> entries;
    for (int r = 0; r < n; ++r) {
      ds.labels[r] = rng.uniform() < 0.5 ? -1.0 : 1.0;
      for (int c = 0; c < d; ++c) {
        if (rng.uniform() < 0.3) {
          entries.emplace_back(r, c,
                               rng.normal() * std::pow(10.0, -6 + 12 * rng.uniform()));
        }
      }
    }
    ds.features.resize(n, d);
    ds.features.setFromTriplets(entries.begin(), entries.end());
    ds.features.makeCompressed();

    std::ostringstream text;
    write_libsvm(ds, text);
    std::istringstream in(text.str());
    const Dataset back = parse_libsvm(in, ds.d);
    const bool same =
        back.n == ds.n && back.d == ds.d && back.labels == ds.labels &&
        Eigen::MatrixXd(back.features) == Eigen::MatrixXd(ds.features);
    if (same) ++roundtrips;
  }

  const std::vector<std::string> malformed = {
      "1 1:0.5\n1 2:abc\n",     // non-numeric value on line 2
      "1 1:0.5\n1 x:1\n",       // non-numeric index on line 2
      "1 1:0.5\n-1 0:1\n",      // nonpositive index on line 2
      "1 1:0.5\n1 3:1 2:4\n",   // unsorted indices on line 2
      "1 1:0.5\n1 2:1 2:3\n",   // duplicate index on line 2
      "1 1:0.5\n2 1:0.5\n",     // multi-class label on line 2
      "1 1:0.5\n1 2\n",         // missing value on line 2
  };
  int rejected = 0;
  for (const std::string& text : malformed) {
    std::istringstream in(text);
    try {
      parse_libsvm(in);
    } catch (const ParseError& error) {
      if (error.line() == 2) ++rejected;
    }
  }
  const bool pass =
      roundtrips == 100 && rejected == static_cast<int>(malformed.size());
  return {"libsvm_roundtrip", pass,
          std::to_string(roundtrips) + "/100 round trips, " +
              std::to_string(rejected) + "/" +
              std::to_string(malformed.size()) +
              " malformed fixtures rejected with line numbers"};
}

std::vector<CriterionResult> run_suite(const std::string& suite) {
  if (suite == "equivalence") return {update_forms_equivalence()};
  if (suite == "envelope") return {global_envelope()};
  if (suite == "local") return {local_linear_envelope()};
  if (suite == "rho") return {rho_sanity()};
  if (suite == "all") {
    return {update_forms_equivalence(),
            stepsize_correctness(),
            projection_suite(),
            monotone_and_one_step_decrease(),
            global_envelope(),
            local_linear_envelope(),
            quadratic_one_step(),
            affine_invariance(),
            rho_sanity(),
            sscn_subsolver_and_comparability(),
            libsvm_roundtrip()};
  }
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

}  // namespace sgn::verify
