#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "sgn/objectives.hpp"
#include "sgn/solvers.hpp"

namespace sgn {

// Flat key-value experiment description (see load_config for the key set).
struct ExperimentConfig {
  std::string algorithm = "sgn";
  std::string dataset;  // path; empty selects the synthetic generator
  int synth_n = 200;
  int synth_d = 20;
  double synth_kappa = 10.0;
  double lambda = -1;  // < 0: 1e-3 * mean squared feature norm
  int tau = 1;
  std::string sketch = "coordinate";  // coordinate | gaussian | identity
  std::uint64_t seed = 0;
  int max_iters = 1000;
  int replications = 1;
  double l_alg = -1;  // < 0: estimated from the data
  double l_hat = -1;
  double sigma = -1;
  double l_s = -1;
  std::string out_dir = "out";
};

// Parses `key = value` lines; '#' comments and blank lines are skipped.
// Unknown keys are rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

// Everything a run needs, with constants resolved from the config or
// estimated from the data when left unset.
struct ExperimentSetup {
  std::shared_ptr<const LogisticRegression> oracle;
  SolverConfig solver;
  SmoothnessEstimates constants;
  Eigen::VectorXd x0;
};

ExperimentSetup prepare_experiment(const ExperimentConfig& config);

struct FStarResult {
  double f_star = 0;
  Eigen::VectorXd minimizer;
  int iterations = 0;
};

// Reference optimum by the full-dimensional damped Newton iteration, down to
// dual gradient norm <= tol. Deterministic; throws after max_iters without
// convergence.
FStarResult compute_fstar(const ObjectiveOracle& oracle, double tol = 1e-12,
                          int max_iters = 10000, double l_alg = 1e-8);
FStarResult compute_fstar(const ObjectiveOracle& oracle,
                          const Eigen::VectorXd& x0, double tol,
                          int max_iters, double l_alg);

struct RateFit {
  double slope = 0;
  double intercept = 0;
};

// Least-squares slope of log(suboptimality) vs log(k) over k in
// [k_lo, k_hi]. Values must be positive (clamp before calling).
RateFit estimate_rate(const std::vector<double>& suboptimality, int k_lo,
                      int k_hi);

// Suboptimality floor applied before logarithms and log files.
inline double clamp_subopt(double s) { return s < 1e-15 ? 1e-15 : s; }

// Per-k test of the global convergence envelope
//   4 d^3 delta0 / (tau^3 k^3) + 9 (l_s_sup + l_semi) d^2 R^3 / (2 tau^2 k^2)
// against the replication-mean suboptimality (index = k, entry 0 = delta0).
std::vector<bool> check_global_envelope(const std::vector<double>& mean_subopt,
                                        const SmoothnessEstimates& constants,
                                        double r_hat, double delta0, int tau,
                                        int d);

// Envelope constant of the local linear rate, from the rate proof with the
// neighborhood parameter gamma = 1: b = 4 max{ sqrt(l_alg/(4 l_sc)), 1 }.
double local_linear_b(double l_alg, double l_sc);

// true iff the ensemble mean lies below (1 - tau/(b d))^k * delta0 within
// three standard errors of the mean, for every k. Requires >= 100
// replications; rows are per-replication suboptimality sequences.
bool check_local_linear(const std::vector<std::vector<double>>& ensemble,
                        int tau, int d, double b);

struct ExperimentSummary {
  double f_star = 0;
  std::vector<std::vector<TraceRecord>> traces;  // per replication
  std::vector<double> mean_subopt;               // per k
  std::vector<double> median_subopt;
  RateFit rate;
  int rate_k_lo = 0;
  int rate_k_hi = 0;
  std::vector<std::string> failures;  // per-replication error messages
};

// Runs the configured replications (concurrently, one RNG stream each),
// writes one CSV per replication plus summary/rates/long-format CSVs under
// out_dir, and returns the aggregates.
ExperimentSummary run_experiment(const ExperimentConfig& config);

// Runs one short experiment per grid value of the named constant
// ("l_alg" | "l_hat" | "sigma" | "l_s") with a shared seed and returns the
// value with the smallest final suboptimality; ties go to the larger
// constant (the safer guarantee).
double tune_constant(const ExperimentConfig& config,
                     const std::vector<double>& grid, const std::string& param);

// Monte-Carlo estimate of the conditioning of the expected stepsize-weighted
// projection at x: smallest nonzero eigenvalue of mean(alpha_S P_x),
// symmetrized in the local geometry, clamped into (0,1].
double estimate_rho(const ObjectiveOracle& oracle, const Eigen::VectorXd& x,
                    const SketchDistribution& dist, int samples, double l_alg);

// Stepsize constant of the rho-dependent global linear mode:
// (9/2) * l_s_sup * l_hat^2.
inline double global_linear_l_alg(double l_s_sup, double l_hat) {
  return 4.5 * l_s_sup * l_hat * l_hat;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);

}  // namespace sgn
