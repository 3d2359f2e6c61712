#include "sgn/solvers.hpp"

#include <Eigen/Cholesky>
#include <chrono>
#include <cmath>
#include <limits>

#include "sgn/geometry.hpp"

namespace sgn {

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "sgn") return Algorithm::kSgn;
  if (name == "rsn") return Algorithm::kRsn;
  if (name == "aicn") return Algorithm::kAicn;
  if (name == "sscn") return Algorithm::kSscn;
  if (name == "newton-exact-descent") return Algorithm::kNewtonExactDescent;
  if (name == "coordinate-descent") return Algorithm::kCoordinateDescent;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

std::string algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kSgn: return "sgn";
    case Algorithm::kRsn: return "rsn";
    case Algorithm::kAicn: return "aicn";
    case Algorithm::kSscn: return "sscn";
    case Algorithm::kNewtonExactDescent: return "newton-exact-descent";
    case Algorithm::kCoordinateDescent: return "coordinate-descent";
  }
  throw std::logic_error("unknown algorithm enum");
}

double sgn_stepsize(double l_alg, double g_dual, double series_threshold) {
  if (l_alg < 0 || g_dual < 0) {
    throw std::invalid_argument("sgn_stepsize: inputs must be nonnegative");
  }
  const double c = l_alg * g_dual;
  if (c <= series_threshold) {
    return 1.0 - 0.5 * c + 0.5 * c * c;
  }
  // (-1 + sqrt(1+2c))/c rationalized; no cancellation for any c > 0.
  return 2.0 / (1.0 + std::sqrt(1.0 + 2.0 * c));
}

double model_value(const ObjectiveOracle& oracle, const Eigen::VectorXd& x,
                   const SketchMatrix& sketch, const Eigen::VectorXd& h,
                   double l_alg) {
  const Eigen::VectorXd g_s = oracle.sketched_gradient(x, sketch.matrix);
  const Eigen::MatrixXd h_s = oracle.sketched_hessian(x, sketch.matrix);
  const double quad = std::max(h.dot(h_s * h), 0.0);
  const double norm = std::sqrt(quad);
  return oracle.value(x) + g_s.dot(h) + 0.5 * quad +
         l_alg / 6.0 * norm * norm * norm;
}

namespace {

double cubic_model_gap(const Eigen::VectorXd& g_s, const Eigen::MatrixXd& h_s,
                       const Eigen::VectorXd& h, double l_alg) {
  const double quad = std::max(h.dot(h_s * h), 0.0);
  const double norm = std::sqrt(quad);
  return -(g_s.dot(h) + 0.5 * quad + l_alg / 6.0 * norm * norm * norm);
}

}  // namespace

StepReport sgn_step(const ObjectiveOracle& oracle, const SolverState& state,
                    const SketchMatrix& sketch, const SolverConfig& config) {
  const Eigen::VectorXd& x = state.x;
  const Eigen::VectorXd g_s = oracle.sketched_gradient(x, sketch.matrix);
  const Eigen::MatrixXd h_s = oracle.sketched_hessian(x, sketch.matrix);
  const GeometryContext ctx(h_s);
  const double g_dual = dual_norm(ctx, g_s);  // throws on a range violation
  const double alpha = sgn_stepsize(config.constants.l_alg, g_dual,
                                    config.small_g_series_threshold);
  StepReport report;
  report.sketched_dual_norm = g_dual;
  report.alpha = alpha;
  report.f_before = oracle.value(x);
  if (g_dual == 0.0) {
    report.new_x = x;  // stationary in the subspace
    return report;
  }
  const Eigen::VectorXd h = -alpha * ctx.apply_pseudo_inverse(g_s);
  report.new_x = x + sketch.matrix * h;
  report.model_decrease = cubic_model_gap(g_s, h_s, h, config.constants.l_alg);
  report.function_decrease = report.f_before - oracle.value(report.new_x);
  return report;
}

StepReport sgn_step_sap_form(const ObjectiveOracle& oracle,
                             const SolverState& state,
                             const SketchMatrix& sketch,
                             const SolverConfig& config) {
  const Eigen::VectorXd& x = state.x;
  const Eigen::VectorXd g = oracle.gradient(x);
  const GeometryContext ctx(oracle.hessian(x));
  if (!range_check(ctx, g)) {
    throw RangeViolation(
        "sgn_step_sap_form: gradient has a component outside the Hessian "
        "range; the projected update is not defined");
  }
  const ProjectionOperator proj(ctx, sketch.matrix);
  const Eigen::VectorXd projected_grad = proj.apply_transpose(g);
  const double g_dual = dual_norm(ctx, projected_grad);
  const double alpha = sgn_stepsize(config.constants.l_alg, g_dual,
                                    config.small_g_series_threshold);
  StepReport report;
  report.sketched_dual_norm = g_dual;
  report.alpha = alpha;
  report.f_before = oracle.value(x);
  if (g_dual == 0.0) {
    report.new_x = x;
    return report;
  }
  const Eigen::VectorXd newton = ctx.apply_pseudo_inverse(g);
  const Eigen::VectorXd delta = -alpha * proj.apply(newton);
  report.new_x = x + delta;
  // Model gap through the full-space form of the sketched model.
  const double quad = std::max(oracle.hessian_quadratic_form(x, delta), 0.0);
  const double norm = std::sqrt(quad);
  report.model_decrease = -(g.dot(delta) + 0.5 * quad +
                            config.constants.l_alg / 6.0 * norm * norm * norm);
  report.function_decrease = report.f_before - oracle.value(report.new_x);
  return report;
}

StepReport rsn_step(const ObjectiveOracle& oracle, const SolverState& state,
                    const SketchMatrix& sketch, double l_hat) {
  if (!(l_hat > 0)) {
    throw std::invalid_argument("rsn_step: l_hat must be positive");
  }
  const Eigen::VectorXd& x = state.x;
  const Eigen::VectorXd g_s = oracle.sketched_gradient(x, sketch.matrix);
  const Eigen::MatrixXd h_s = oracle.sketched_hessian(x, sketch.matrix);
  const GeometryContext ctx(h_s);
  const double g_dual = dual_norm(ctx, g_s);
  StepReport report;
  report.sketched_dual_norm = g_dual;
  report.alpha = 1.0 / l_hat;
  report.f_before = oracle.value(x);
  if (g_dual == 0.0) {
    report.new_x = x;
    return report;
  }
  const Eigen::VectorXd h = -(1.0 / l_hat) * ctx.apply_pseudo_inverse(g_s);
  report.new_x = x + sketch.matrix * h;
  // Gap of the relative-smoothness model <g,h> + l_hat/2 |h|^2_{x,S}.
  report.model_decrease =
      -(g_s.dot(h) + 0.5 * l_hat * std::max(h.dot(h_s * h), 0.0));
  report.function_decrease = report.f_before - oracle.value(report.new_x);
  return report;
}

StepReport aicn_step(const ObjectiveOracle& oracle, const SolverState& state,
                     double l_alg) {
  const GeometryContext ctx(oracle.hessian(state.x));
  if (!ctx.positive_definite()) {
    throw std::invalid_argument(
        "aicn_step: Hessian is rank-deficient within tolerance at the iterate");
  }
  SolverConfig config;
  config.constants.l_alg = l_alg;
  const int d = oracle.dimension();
  return sgn_step(oracle, state,
                  SketchMatrix{Eigen::MatrixXd::Identity(d, d), d}, config);
}

SscnSubproblem solve_sscn_subproblem(const Eigen::VectorXd& g,
                                     const Eigen::MatrixXd& q,
                                     const Eigen::MatrixXd& gram, double l_s) {
  if (!(l_s > 0)) {
    throw std::invalid_argument("solve_sscn_subproblem: l_s must be positive");
  }
  SscnSubproblem out;
  if (g.norm() == 0.0) {
    out.h = Eigen::VectorXd::Zero(g.size());
    return out;
  }

  // h(r) = -(Q + (l_s r / 2) C)^{-1} g; the minimizer's radius is the fixed
  // point r = ||h(r)||_C with monotone residual ||h(r)||_C - r.
  const GeometryContext ctx(q);
  const auto solve_radius = [&](double r) -> Eigen::VectorXd {
    if (r == 0.0) return -ctx.apply_pseudo_inverse(g);
    const Eigen::MatrixXd shifted = q + (0.5 * l_s * r) * gram;
    return Eigen::LDLT<Eigen::MatrixXd>(shifted).solve(-g);
  };
  const auto gram_norm = [&](const Eigen::VectorXd& h) {
    return std::sqrt(std::max(h.dot(gram * h), 0.0));
  };

  constexpr int kMaxBisections = 200;
  const double newton_radius = gram_norm(solve_radius(0.0));
  double lo = 0.0;
  double hi = std::max(newton_radius, 1.0);
  int doublings = 0;
  while (gram_norm(solve_radius(hi)) - hi > 0) {
    hi *= 2.0;
    if (++doublings > kMaxBisections) {
      throw SubsolverError(
          "solve_sscn_subproblem: could not bracket the cubic radius");
    }
  }
  double r = hi;
  Eigen::VectorXd h = solve_radius(r);
  // Fixed-point tolerance two decades inside the 1e-10 (1+r) contract so the
  // radius itself is accurate to ~1e-10.
  for (int iter = 0;; ++iter) {
    r = 0.5 * (lo + hi);
    h = solve_radius(r);
    const double residual = gram_norm(h) - r;
    if (std::abs(residual) <= 1e-12 * (1.0 + r)) break;
    if (iter >= kMaxBisections) {
      throw SubsolverError(
          "solve_sscn_subproblem: bisection did not converge in 200 iterations");
    }
    (residual > 0 ? lo : hi) = r;
  }
  out.h = h;
  out.radius = gram_norm(h);
  out.bisections = doublings + 1;
  return out;
}

StepReport sscn_step(const ObjectiveOracle& oracle, const SolverState& state,
                     const SketchMatrix& sketch, double l_s) {
  if (!(l_s > 0)) {
    throw std::invalid_argument("sscn_step: l_s must be positive");
  }
  const Eigen::VectorXd& x = state.x;
  const Eigen::VectorXd g_s = oracle.sketched_gradient(x, sketch.matrix);
  const Eigen::MatrixXd q = oracle.sketched_hessian(x, sketch.matrix);
  const Eigen::MatrixXd gram = sketch.matrix.transpose() * sketch.matrix;
  const GeometryContext ctx(q);

  StepReport report;
  report.f_before = oracle.value(x);
  report.sketched_dual_norm =
      std::sqrt(std::max(g_s.dot(ctx.apply_pseudo_inverse(g_s)), 0.0));
  if (g_s.norm() == 0.0) {
    report.new_x = x;
    return report;
  }

  const SscnSubproblem sub = solve_sscn_subproblem(g_s, q, gram, l_s);
  report.new_x = x + sketch.matrix * sub.h;
  report.model_decrease =
      -(g_s.dot(sub.h) + 0.5 * std::max(sub.h.dot(q * sub.h), 0.0) +
        l_s / 6.0 * sub.radius * sub.radius * sub.radius);
  report.function_decrease = report.f_before - oracle.value(report.new_x);
  report.subsolver_iterations = sub.bisections;
  return report;
}

StepReport newton_exact_descent_step(const ObjectiveOracle& oracle,
                                     const SolverState& state, double sigma) {
  if (!(sigma > 0)) {
    throw std::invalid_argument(
        "newton_exact_descent_step: sigma must be positive");
  }
  const Eigen::VectorXd& x = state.x;
  const Eigen::VectorXd g = oracle.gradient(x);
  const GeometryContext ctx(oracle.hessian(x));
  const double g_dual = dual_norm(ctx, g);  // throws on a range violation
  StepReport report;
  report.sketched_dual_norm = g_dual;
  report.alpha = 1.0 / sigma;
  report.f_before = oracle.value(x);
  if (g_dual == 0.0) {
    report.new_x = x;
    return report;
  }
  const Eigen::VectorXd h = -(1.0 / sigma) * ctx.apply_pseudo_inverse(g);
  report.new_x = x + h;
  report.model_decrease =
      -(g.dot(h) + 0.5 * sigma * std::max(h.dot(ctx.hessian() * h), 0.0));
  report.function_decrease = report.f_before - oracle.value(report.new_x);
  return report;
}

StepReport coordinate_descent_step(const ObjectiveOracle& oracle,
                                   const SolverState& state,
                                   const Eigen::VectorXd& coord_lipschitz,
                                   const SketchMatrix& sketch) {
  if (coord_lipschitz.size() != oracle.dimension()) {
    throw std::invalid_argument(
        "coordinate_descent_step: coordinate bounds have wrong dimension");
  }
  if (coord_lipschitz.minCoeff() <= 0) {
    throw std::invalid_argument(
        "coordinate_descent_step: coordinate bounds must be positive");
  }
  if (sketch.matrix.cols() != 1) {
    throw std::invalid_argument(
        "coordinate_descent_step: expects a rank-1 coordinate sketch");
  }
  int coord = -1;
  for (int i = 0; i < sketch.matrix.rows(); ++i) {
    if (sketch.matrix(i, 0) != 0.0) {
      if (coord >= 0 || sketch.matrix(i, 0) != 1.0) {
        throw std::invalid_argument(
            "coordinate_descent_step: sketch is not a coordinate vector");
      }
      coord = i;
    }
  }
  if (coord < 0) {
    throw std::invalid_argument(
        "coordinate_descent_step: sketch is not a coordinate vector");
  }
  const Eigen::VectorXd& x = state.x;
  const double partial = oracle.gradient(x)[coord];
  const double lips = coord_lipschitz[coord];
  StepReport report;
  report.f_before = oracle.value(x);
  report.alpha = 1.0 / lips;
  report.sketched_dual_norm = std::abs(partial) / std::sqrt(lips);
  report.new_x = x;
  report.new_x[coord] -= partial / lips;
  report.model_decrease = partial * partial / (2.0 * lips);
  report.function_decrease = report.f_before - oracle.value(report.new_x);
  return report;
}

namespace {

void validate_config(const ObjectiveOracle& oracle, const SolverConfig& config) {
  const auto needs_distribution = [&] {
    if (!config.sketch_provider && !config.distribution) {
      throw std::invalid_argument(
          "run: algorithm needs a sketch distribution or provider");
    }
    if (config.distribution &&
        config.distribution->dimension() != oracle.dimension()) {
      throw std::invalid_argument("run: distribution dimension mismatch");
    }
  };
  switch (config.algorithm) {
    case Algorithm::kSgn:
      if (!(config.constants.l_alg > 0)) {
        throw std::invalid_argument("run: sgn requires l_alg > 0");
      }
      needs_distribution();
      break;
    case Algorithm::kAicn:
      if (!(config.constants.l_alg > 0)) {
        throw std::invalid_argument("run: aicn requires l_alg > 0");
      }
      break;
    case Algorithm::kRsn:
      if (!(config.constants.l_hat > 0)) {
        throw std::invalid_argument("run: rsn requires l_hat > 0");
      }
      needs_distribution();
      break;
    case Algorithm::kSscn:
      if (!(config.l_s > 0)) {
        throw std::invalid_argument("run: sscn requires l_s > 0");
      }
      needs_distribution();
      break;
    case Algorithm::kNewtonExactDescent:
      if (!(config.sigma > 0)) {
        throw std::invalid_argument(
            "run: newton-exact-descent requires sigma > 0");
      }
      break;
    case Algorithm::kCoordinateDescent:
      needs_distribution();
      if (!config.sketch_provider &&
          (config.distribution->kind() != SketchKind::kCoordinate ||
           config.distribution->tau() != 1)) {
        throw std::invalid_argument(
            "run: coordinate descent needs a rank-1 coordinate distribution");
      }
      if (config.coord_lipschitz.size() != oracle.dimension()) {
        throw std::invalid_argument(
            "run: coordinate descent needs per-coordinate bounds");
      }
      break;
  }
}

// Oracle cost of one step in units of d * tau_ref^2 (tau_ref = configured
// sketch rank). Full-dimensional steps count as d^3; the sscn subsolver adds
// tau^3 per inner solve.
double step_cost_units(const SolverConfig& config, int d, int tau,
                       int subsolver_iterations) {
  const double tau_ref =
      config.distribution ? config.distribution->tau() : d;
  const double unit = static_cast<double>(d) * tau_ref * tau_ref;
  double ops = 0;
  switch (config.algorithm) {
    case Algorithm::kAicn:
    case Algorithm::kNewtonExactDescent:
      ops = static_cast<double>(d) * d * d;
      break;
    case Algorithm::kCoordinateDescent:
      ops = d;
      break;
    default:
      ops = static_cast<double>(d) * tau * tau +
            static_cast<double>(subsolver_iterations) * tau * tau * tau;
      break;
  }
  return ops / unit;
}

}  // namespace

RunResult run(const ObjectiveOracle& oracle, const SolverConfig& config,
              const Eigen::VectorXd& x0) {
  if (x0.size() != oracle.dimension()) {
    throw std::invalid_argument("run: x0 has wrong dimension");
  }
  if (!x0.allFinite()) throw std::invalid_argument("run: x0 must be finite");
  validate_config(oracle, config);

  const int d = oracle.dimension();
  const auto sketch_at = [&](std::uint64_t k) -> SketchMatrix {
    if (config.sketch_provider) return config.sketch_provider(k);
    switch (config.algorithm) {
      case Algorithm::kAicn:
      case Algorithm::kNewtonExactDescent:
        return {Eigen::MatrixXd::Identity(d, d), d};
      default:
        return sample(*config.distribution, k);
    }
  };

  RunResult result;
  result.trace.reserve(config.max_iters + 1);
  SolverState state;
  state.x = x0;
  double cost = 0;
  const auto start = std::chrono::steady_clock::now();

  for (int k = 0;; ++k) {
    state.k = k;
    StepReport report;
    SketchMatrix sketch = sketch_at(static_cast<std::uint64_t>(k));
    try {
      switch (config.algorithm) {
        case Algorithm::kSgn:
          report = sgn_step(oracle, state, sketch, config);
          break;
        case Algorithm::kRsn:
          report = rsn_step(oracle, state, sketch, config.constants.l_hat);
          break;
        case Algorithm::kAicn:
          report = aicn_step(oracle, state, config.constants.l_alg);
          break;
        case Algorithm::kSscn:
          report = sscn_step(oracle, state, sketch, config.l_s);
          break;
        case Algorithm::kNewtonExactDescent:
          report = newton_exact_descent_step(oracle, state, config.sigma);
          break;
        case Algorithm::kCoordinateDescent:
          report = coordinate_descent_step(oracle, state,
                                           config.coord_lipschitz, sketch);
          break;
      }
    } catch (const std::exception& error) {
      throw std::runtime_error("iteration " + std::to_string(k) + ": " +
                               error.what());
    }

    cost += step_cost_units(config, d, sketch.rank,
                            report.subsolver_iterations);
    TraceRecord record;
    record.k = k;
    record.f_value = report.f_before;
    record.suboptimality = config.f_star
                               ? report.f_before - *config.f_star
                               : std::numeric_limits<double>::quiet_NaN();
    record.g_dual = report.sketched_dual_norm;
    record.alpha = report.alpha;
    record.cost_dtau2 = cost;
    record.wall_ns = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now() - start)
            .count());
    result.trace.push_back(record);
    if (config.record_iterates) result.iterates.push_back(state.x);

    const bool subopt_stop = config.f_star && config.stop_subopt > 0 &&
                             report.f_before - *config.f_star <=
                                 config.stop_subopt;
    if (k == config.max_iters ||
        report.sketched_dual_norm <= config.stop_g_dual || subopt_stop) {
      break;
    }
    state.x = report.new_x;
    state.last_alpha = report.alpha;
    state.last_sketched_dual_norm = report.sketched_dual_norm;
  }
  return result;
}

}  // namespace sgn
