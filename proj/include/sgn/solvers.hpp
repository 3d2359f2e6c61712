#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sgn/objectives.hpp"
#include "sgn/sketching.hpp"

namespace sgn {

class SubsolverError : public std::runtime_error {
 public:
  explicit SubsolverError(const std::string& what) : std::runtime_error(what) {}
};

enum class Algorithm {
  kSgn,
  kRsn,
  kAicn,
  kSscn,
  kNewtonExactDescent,
  kCoordinateDescent,
};

Algorithm algorithm_from_name(const std::string& name);
std::string algorithm_name(Algorithm algorithm);

struct SolverConfig {
  Algorithm algorithm = Algorithm::kSgn;
  SmoothnessEstimates constants;  // l_alg for sgn/aicn, l_hat for rsn
  double sigma = 0;               // exact Newton descent stability constant
  double l_s = 0;                 // sscn cubic constant (l2 geometry)
  std::optional<SketchDistribution> distribution;
  Eigen::VectorXd coord_lipschitz;  // coordinate descent curvature bounds

  int max_iters = 1000;
  double stop_g_dual = 1e-10;
  std::optional<double> f_star;  // enables the suboptimality stop
  double stop_subopt = 0;        // <= 0 disables
  double small_g_series_threshold = 1e-8;

  bool record_iterates = false;
  // Overrides distribution sampling when set; position k -> sketch for
  // iteration k. Used by the affine-invariance suites.
  std::function<SketchMatrix(std::uint64_t)> sketch_provider;
};

struct SolverState {
  Eigen::VectorXd x;
  int k = 0;
  double last_alpha = 1.0;
  double last_sketched_dual_norm = 0.0;
};

struct StepReport {
  Eigen::VectorXd new_x;
  double alpha = 1.0;
  double sketched_dual_norm = 0.0;
  double f_before = 0.0;
  double model_decrease = 0.0;     // f(x) minus the step's model minimum
  double function_decrease = 0.0;  // f(x) - f(new_x)
  int subsolver_iterations = 0;
};

// Per-iteration log row. suboptimality is NaN until f* is known.
struct TraceRecord {
  int k = 0;
  double f_value = 0;
  double suboptimality = 0;
  double g_dual = 0;  // sketched dual gradient norm at x^k
  double alpha = 0;
  double cost_dtau2 = 0;  // cumulative oracle cost in units of d*tau^2
  std::uint64_t wall_ns = 0;
};

struct RunResult {
  std::vector<TraceRecord> trace;
  std::vector<Eigen::VectorXd> iterates;  // filled when record_iterates
};

// Positive root of 1 - a - (l_alg*g_dual/2) a^2 = 0, the damped-Newton
// stepsize. Below series_threshold the product l_alg*g_dual switches to the
// series expansion of the root: the closed form (-1+sqrt(1+2c))/c cancels
// catastrophically as c -> 0 while the root tends to 1.
double sgn_stepsize(double l_alg, double g_dual,
                    double series_threshold = 1e-8);

// Sketched cubic model f(x) + <g_S,h> + 1/2 |h|^2_{x,S} + l_alg/6 |h|^3_{x,S}.
double model_value(const ObjectiveOracle& oracle, const Eigen::VectorXd& x,
                   const SketchMatrix& sketch, const Eigen::VectorXd& h,
                   double l_alg);

// Damped Newton form: x+ = x - a S (S^T H S)^dagger S^T g with the stepsize
// above. Requires the sketched gradient inside the sketched Hessian range.
StepReport sgn_step(const ObjectiveOracle& oracle, const SolverState& state,
                    const SketchMatrix& sketch, const SolverConfig& config);

// Sketch-and-project form: x+ = x - a P_x H^dagger g. Same iterate as
// sgn_step by the update-rule equivalence; exists to test it through an
// independent computational path (full-dimensional pseudoinverse).
StepReport sgn_step_sap_form(const ObjectiveOracle& oracle,
                             const SolverState& state,
                             const SketchMatrix& sketch,
                             const SolverConfig& config);

// Subspace Newton with the fixed stepsize 1/l_hat.
StepReport rsn_step(const ObjectiveOracle& oracle, const SolverState& state,
                    const SketchMatrix& sketch, double l_hat);

// Full-dimensional special case of sgn_step (S = I). Requires a full-rank
// Hessian at the iterate.
StepReport aicn_step(const ObjectiveOracle& oracle, const SolverState& state,
                     double l_alg);

// Cubic regularization in the l2 norm of the moved point: minimizes
// <g_S,h> + 1/2 |h|^2_{x,S} + l_s/6 ||S h||_2^3 by a scalar bisection on
// r = ||S h||_2 (the stationary h solves a tau x tau shifted system).
StepReport sscn_step(const ObjectiveOracle& oracle, const SolverState& state,
                     const SketchMatrix& sketch, double l_s);

struct SscnSubproblem {
  Eigen::VectorXd h;
  double radius = 0;  // ||h||_gram at the fixed point
  int bisections = 0;
};

// Minimizer of <g,h> + 1/2 h^T q h + l_s/6 ||h||_gram^3: h(r) solves the
// shifted system (q + l_s r/2 gram) h = -g, bisected on the fixed point
// r = ||h(r)||_gram until |r - ||h(r)||_gram| <= 1e-10 (1+r).
SscnSubproblem solve_sscn_subproblem(const Eigen::VectorXd& g,
                                     const Eigen::MatrixXd& q,
                                     const Eigen::MatrixXd& gram, double l_s);

// x+ = x - (1/sigma) H^dagger g.
StepReport newton_exact_descent_step(const ObjectiveOracle& oracle,
                                     const SolverState& state, double sigma);

// x+ = x - (1/L_i) d_i f(x) e_i for the coordinate carried by the rank-1
// coordinate sketch.
StepReport coordinate_descent_step(const ObjectiveOracle& oracle,
                                   const SolverState& state,
                                   const Eigen::VectorXd& coord_lipschitz,
                                   const SketchMatrix& sketch);

// Iterates the configured step until max_iters or a stop threshold. Emits
// one TraceRecord per visited iterate (the last row's step is computed but
// not applied). Deterministic given the distribution seed.
RunResult run(const ObjectiveOracle& oracle, const SolverConfig& config,
              const Eigen::VectorXd& x0);

}  // namespace sgn
