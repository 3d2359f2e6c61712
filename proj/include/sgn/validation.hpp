#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>

#include "sgn/objectives.hpp"
#include "sgn/rng.hpp"
#include "sgn/sketching.hpp"

namespace sgn {

// Independent oracles for tests and acceptance suites. Nothing here is used
// by the solvers.

struct OracleReport {
  double max_abs_error = 0;
  double max_rel_error = 0;
  int probe_count = 0;
  Eigen::VectorXd worst_probe;
};

// Central differences (f(x+s e_i) - f(x-s e_i)) / (2s) per coordinate.
Eigen::VectorXd fd_gradient(const ObjectiveOracle& oracle,
                            const Eigen::VectorXd& x, double step);

// Central differences of the analytic gradient; checks the Hessian oracle
// through a path that never calls it.
Eigen::MatrixXd fd_hessian(const ObjectiveOracle& oracle,
                           const Eigen::VectorXd& x, double step);

// Standard truncation/rounding balance for central differences.
double fd_default_step(const Eigen::VectorXd& x);

// Brute-force minimizer of the sketched cubic model: coarse grid over the
// box |h_j| <= 4 ||(S^T H S)^dagger g_S|| followed by per-coordinate
// golden-section sweeps until the model stationarity residual is <= 1e-6.
// Supports tau <= 2 (the grid is exponential in tau).
Eigen::VectorXd brute_model_argmin(const ObjectiveOracle& oracle,
                                   const Eigen::VectorXd& x,
                                   const SketchMatrix& sketch, double l_alg,
                                   int grid = 33, int refine_iters = 200);

struct McExpectation {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd standard_error;  // per entry
  int samples = 0;
};

// Streaming mean and per-entry standard error of a matrix statistic;
// sample i sees an rng derived from (seed, i), so the estimate is
// deterministic per seed.
McExpectation mc_expectation(
    const std::function<Eigen::MatrixXd(CounterRng&)>& statistic, int samples,
    std::uint64_t seed);

// true iff ||grad f(x)||*_x < 2 / ((1 + 1/gamma) l_sc): the region where the
// local linear rate suite is allowed to start.
bool neighborhood_check(const ObjectiveOracle& oracle, const Eigen::VectorXd& x,
                        double l_sc, double gamma);

}  // namespace sgn
