#include "sgn/harness.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <numeric>
#include <sstream>
#include <thread>

#include "sgn/geometry.hpp"
#include "sgn/rng.hpp"

namespace sgn {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "algorithm") cfg.algorithm = value;
      else if (key == "dataset") cfg.dataset = value;
      else if (key == "synth.n") cfg.synth_n = std::stoi(value);
      else if (key == "synth.d") cfg.synth_d = std::stoi(value);
      else if (key == "synth.kappa") cfg.synth_kappa = std::stod(value);
      else if (key == "lambda") cfg.lambda = std::stod(value);
      else if (key == "tau") cfg.tau = std::stoi(value);
      else if (key == "sketch") cfg.sketch = value;
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "max_iters") cfg.max_iters = std::stoi(value);
      else if (key == "replications") cfg.replications = std::stoi(value);
      else if (key == "l_alg") cfg.l_alg = std::stod(value);
      else if (key == "l_hat") cfg.l_hat = std::stod(value);
      else if (key == "sigma") cfg.sigma = std::stod(value);
      else if (key == "l_s") cfg.l_s = std::stod(value);
      else if (key == "out_dir") cfg.out_dir = value;
      else {
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": bad value '" + value + "' for " + key);
    }
  }
  if (cfg.replications < 1) {
    throw std::runtime_error("config: replications must be >= 1");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  ExperimentConfig cfg = parse_config(in);
  if (!cfg.dataset.empty() && !std::filesystem::exists(cfg.dataset)) {
    throw std::runtime_error("config: dataset file '" + cfg.dataset +
                             "' does not exist");
  }
  return cfg;
}

ExperimentSetup prepare_experiment(const ExperimentConfig& config) {
  Dataset data = config.dataset.empty()
                     ? synth_logistic(config.synth_n, config.synth_d,
                                      config.synth_kappa, config.seed)
                     : parse_libsvm_file(config.dataset);
  const double lambda = config.lambda >= 0
                            ? config.lambda
                            : LogisticRegression::default_regularization(data);
  ExperimentSetup setup;
  setup.oracle = std::make_shared<LogisticRegression>(std::move(data), lambda);
  const int d = setup.oracle->dimension();

  setup.constants.l_semi = estimate_semi_strong(
      setup.oracle->hessian_lipschitz_l2(), setup.oracle->strong_convexity());
  setup.constants.l_sc = setup.constants.l_semi;
  setup.constants.l_alg =
      config.l_alg > 0 ? config.l_alg : setup.constants.l_semi;
  setup.constants.l_hat = config.l_hat > 0
                              ? config.l_hat
                              : setup.oracle->relative_smoothness_bound();
  setup.constants.mu_hat = 0;

  SolverConfig& solver = setup.solver;
  solver.algorithm = algorithm_from_name(config.algorithm);
  solver.constants = setup.constants;
  solver.sigma = config.sigma > 0 ? config.sigma : setup.constants.l_hat;
  solver.l_s =
      config.l_s > 0 ? config.l_s : setup.oracle->hessian_lipschitz_l2();
  solver.max_iters = config.max_iters;
  if (config.sketch == "coordinate") {
    solver.distribution =
        SketchDistribution::coordinate(d, config.tau, config.seed);
  } else if (config.sketch == "gaussian") {
    solver.distribution =
        SketchDistribution::gaussian(d, config.tau, config.seed);
  } else if (config.sketch == "identity") {
    solver.distribution = SketchDistribution::identity(d);
  } else {
    throw std::runtime_error("unknown sketch kind '" + config.sketch + "'");
  }
  if (solver.algorithm == Algorithm::kCoordinateDescent) {
    solver.distribution = SketchDistribution::coordinate(d, 1, config.seed);
    solver.coord_lipschitz = setup.oracle->coordinate_lipschitz();
  }
  setup.x0 = Eigen::VectorXd::Zero(d);
  return setup;
}

FStarResult compute_fstar(const ObjectiveOracle& oracle, double tol,
                          int max_iters, double l_alg) {
  return compute_fstar(oracle, Eigen::VectorXd::Zero(oracle.dimension()), tol,
                       max_iters, l_alg);
}

FStarResult compute_fstar(const ObjectiveOracle& oracle,
                          const Eigen::VectorXd& x0, double tol, int max_iters,
                          double l_alg) {
  SolverConfig config;
  config.algorithm = Algorithm::kAicn;
  config.constants.l_alg = l_alg;
  config.max_iters = max_iters;
  config.stop_g_dual = tol;
  config.record_iterates = true;
  const RunResult result = run(oracle, config, x0);
  const TraceRecord& last = result.trace.back();
  if (last.g_dual > tol) {
    throw std::runtime_error(
        "compute_fstar: dual gradient norm " + std::to_string(last.g_dual) +
        " above tolerance after " + std::to_string(max_iters) + " iterations");
  }
  FStarResult out;
  out.f_star = last.f_value;
  out.minimizer = result.iterates.back();
  out.iterations = last.k;
  return out;
}

RateFit estimate_rate(const std::vector<double>& suboptimality, int k_lo,
                      int k_hi) {
  if (k_lo < 1 || k_hi >= static_cast<int>(suboptimality.size()) ||
      k_lo > k_hi) {
    throw std::invalid_argument("estimate_rate: bad window");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = k_hi - k_lo + 1;
  for (int k = k_lo; k <= k_hi; ++k) {
    if (!(suboptimality[k] > 0)) {
      throw std::invalid_argument(
          "estimate_rate: suboptimality must be positive in the window");
    }
    const double x = std::log(static_cast<double>(k));
    const double y = std::log(suboptimality[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  RateFit fit;
  const double denom = n * sxx - sx * sx;
  fit.slope = denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

std::vector<bool> check_global_envelope(const std::vector<double>& mean_subopt,
                                        const SmoothnessEstimates& constants,
                                        double r_hat, double delta0, int tau,
                                        int d) {
  std::vector<bool> ok;
  const double smoothness = constants.l_s_sup + constants.l_semi;
  for (int k = 1; k < static_cast<int>(mean_subopt.size()); ++k) {
    const double kk = static_cast<double>(k);
    const double bound =
        4.0 * d * d * d * delta0 / (tau * tau * tau * kk * kk * kk) +
        9.0 * smoothness * d * d * r_hat * r_hat * r_hat /
            (2.0 * tau * tau * kk * kk);
    ok.push_back(mean_subopt[k] <= bound);
  }
  return ok;
}

double local_linear_b(double l_alg, double l_sc) {
  if (!(l_alg > 0) || !(l_sc > 0)) {
    throw std::invalid_argument("local_linear_b: constants must be positive");
  }
  return 4.0 * std::max(std::sqrt(l_alg / (4.0 * l_sc)), 1.0);
}

bool check_local_linear(const std::vector<std::vector<double>>& ensemble,
                        int tau, int d, double b) {
  if (ensemble.size() < 100) {
    throw std::invalid_argument(
        "check_local_linear: needs at least 100 replications");
  }
  std::size_t length = ensemble.front().size();
  for (const auto& row : ensemble) length = std::min(length, row.size());
  if (length < 2) {
    throw std::invalid_argument("check_local_linear: traces too short");
  }
  const double m = static_cast<double>(ensemble.size());
  const double factor = 1.0 - tau / (b * d);
  double delta0 = 0;
  for (const auto& row : ensemble) delta0 += clamp_subopt(row[0]);
  delta0 /= m;
  double envelope = delta0;
  for (std::size_t k = 1; k < length; ++k) {
    envelope *= factor;
    double mean = 0;
    for (const auto& row : ensemble) mean += clamp_subopt(row[k]);
    mean /= m;
    double var = 0;
    for (const auto& row : ensemble) {
      const double dev = clamp_subopt(row[k]) - mean;
      var += dev * dev;
    }
    const double se = std::sqrt(var / (m - 1.0) / m);
    // trailing factor: float-equality guard for sequences on the envelope
    if (mean > envelope * (1.0 + 3.0 * se / mean) * (1.0 + 1e-12)) {
      return false;
    }
  }
  return true;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "k,f,subopt,g_dual,alpha,cost_dtau2,wall_ns\n";
  char buf[512];
  for (const TraceRecord& r : trace) {
    const double subopt =
        std::isnan(r.suboptimality) ? r.suboptimality
                                    : clamp_subopt(r.suboptimality);
    std::snprintf(buf, sizeof(buf),
                  "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%llu\n", r.k, r.f_value,
                  subopt, r.g_dual, r.alpha, r.cost_dtau2,
                  static_cast<unsigned long long>(r.wall_ns));
    out << buf;
  }
}

namespace {

std::vector<TraceRecord> pad_trace(std::vector<TraceRecord> trace,
                                   int rows) {
  // A replication that hit the gradient stop sits at a stationary point in
  // its subspace; continuing would hold the iterate, so the suboptimality is
  // carried forward to keep ensembles rectangular.
  while (static_cast<int>(trace.size()) < rows) {
    TraceRecord r = trace.back();
    r.k = static_cast<int>(trace.size());
    trace.push_back(r);
  }
  return trace;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  const ExperimentSetup setup = prepare_experiment(config);
  const FStarResult ref =
      compute_fstar(*setup.oracle, 1e-12, 10000,
                    std::min(setup.constants.l_alg, 1e-6));
  ExperimentSummary summary;
  summary.f_star = ref.f_star;

  const int reps = config.replications;
  summary.traces.resize(reps);
  summary.failures.resize(reps);

  const auto run_one = [&](int rep) -> std::vector<TraceRecord> {
    SolverConfig solver = setup.solver;
    solver.f_star = ref.f_star;
    if (solver.distribution) {
      solver.distribution = solver.distribution->with_seed(
          CounterRng::derive(config.seed, static_cast<std::uint64_t>(rep)));
    }
    return run(*setup.oracle, solver, setup.x0).trace;
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(reps)));
  std::vector<std::future<void>> futures;
  std::atomic<int> next{0};
  for (unsigned w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&] {
      for (int rep = next++; rep < reps; rep = next++) {
        try {
          summary.traces[rep] = run_one(rep);
        } catch (const std::exception& error) {
          summary.failures[rep] = error.what();
        }
      }
    }));
  }
  for (auto& f : futures) f.get();

  int rows = 0;
  for (auto& trace : summary.traces) {
    rows = std::max(rows, static_cast<int>(trace.size()));
  }
  for (auto& trace : summary.traces) {
    if (!trace.empty()) trace = pad_trace(std::move(trace), rows);
  }

  // Aggregates over successful replications.
  for (int k = 0; k < rows; ++k) {
    std::vector<double> subopt;
    for (int rep = 0; rep < reps; ++rep) {
      if (!summary.failures[rep].empty()) continue;
      subopt.push_back(clamp_subopt(summary.traces[rep][k].suboptimality));
    }
    if (subopt.empty()) break;
    summary.mean_subopt.push_back(
        std::accumulate(subopt.begin(), subopt.end(), 0.0) / subopt.size());
    summary.median_subopt.push_back(median(std::move(subopt)));
  }
  if (summary.mean_subopt.size() > 2) {
    summary.rate_k_lo =
        std::max(1, static_cast<int>(summary.mean_subopt.size()) / 4);
    summary.rate_k_hi = static_cast<int>(summary.mean_subopt.size()) - 1;
    summary.rate =
        estimate_rate(summary.mean_subopt, summary.rate_k_lo, summary.rate_k_hi);
  }

  // File outputs: one trace per replication, aggregate summary, rate fit and
  // a long-format table for plotting.
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  char name[64];
  for (int rep = 0; rep < reps; ++rep) {
    if (!summary.failures[rep].empty()) continue;
    std::snprintf(name, sizeof(name), "trace_rep%03d.csv", rep);
    std::ofstream out(fs::path(config.out_dir) / name, std::ios::binary);
    write_trace_csv(out, summary.traces[rep]);
  }
  {
    std::ofstream out(fs::path(config.out_dir) / "summary.csv",
                      std::ios::binary);
    out << "k,mean_subopt,median_subopt\n";
    char buf[160];
    for (std::size_t k = 0; k < summary.mean_subopt.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", k,
                    summary.mean_subopt[k], summary.median_subopt[k]);
      out << buf;
    }
  }
  {
    std::ofstream out(fs::path(config.out_dir) / "rates.csv", std::ios::binary);
    char buf[160];
    out << "k_lo,k_hi,slope,intercept\n";
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g\n", summary.rate_k_lo,
                  summary.rate_k_hi, summary.rate.slope,
                  summary.rate.intercept);
    out << buf;
  }
  {
    std::ofstream out(fs::path(config.out_dir) / "long.csv", std::ios::binary);
    out << "rep,k,subopt\n";
    char buf[160];
    for (int rep = 0; rep < reps; ++rep) {
      if (!summary.failures[rep].empty()) continue;
      for (const TraceRecord& r : summary.traces[rep]) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", rep, r.k,
                      clamp_subopt(r.suboptimality));
        out << buf;
      }
    }
  }
  {
    std::ofstream out(fs::path(config.out_dir) / "failures.txt",
                      std::ios::binary);
    for (int rep = 0; rep < reps; ++rep) {
      if (!summary.failures[rep].empty()) {
        out << "rep " << rep << ": " << summary.failures[rep] << '\n';
      }
    }
  }
  return summary;
}

double tune_constant(const ExperimentConfig& config,
                     const std::vector<double>& grid,
                     const std::string& param) {
  if (grid.empty()) throw std::invalid_argument("tune_constant: empty grid");
  double best_value = 0;
  double best_metric = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const double value : grid) {
    ExperimentConfig probe = config;
    probe.replications = 1;
    probe.out_dir = config.out_dir + "/tune";
    if (param == "l_alg") probe.l_alg = value;
    else if (param == "l_hat") probe.l_hat = value;
    else if (param == "sigma") probe.sigma = value;
    else if (param == "l_s") probe.l_s = value;
    else throw std::invalid_argument("tune_constant: unknown param " + param);
    double metric = std::numeric_limits<double>::infinity();
    try {
      const ExperimentSummary summary = run_experiment(probe);
      if (!summary.mean_subopt.empty() && summary.failures[0].empty()) {
        metric = summary.mean_subopt.back();
        any = true;
      }
    } catch (const std::exception&) {
      // failed grid point; skipped
    }
    // Ties break toward the larger constant, the safer guarantee.
    if (metric < best_metric ||
        (metric == best_metric && value > best_value)) {
      best_metric = metric;
      best_value = value;
    }
  }
  if (!any) throw std::runtime_error("tune_constant: all grid points failed");
  return best_value;
}

double estimate_rho(const ObjectiveOracle& oracle, const Eigen::VectorXd& x,
                    const SketchDistribution& dist, int samples, double l_alg) {
  if (samples < 1) {
    throw std::invalid_argument("estimate_rho: samples must be >= 1");
  }
  const GeometryContext ctx(oracle.hessian(x));
  if (!ctx.positive_definite()) {
    throw std::invalid_argument("estimate_rho: geometry is singular at x");
  }
  const int d = ctx.dimension();
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < samples; ++i) {
    const SketchMatrix s = sample(dist, static_cast<std::uint64_t>(i));
    const Eigen::VectorXd g_s = oracle.sketched_gradient(x, s.matrix);
    const Eigen::MatrixXd h_s = oracle.sketched_hessian(x, s.matrix);
    const GeometryContext sub(h_s);
    const double alpha = sgn_stepsize(l_alg, dual_norm(sub, g_s));
    mean += alpha * projection(ctx, s.matrix).matrix();
  }
  mean /= static_cast<double>(samples);

  // Similarity transform by H^{1/2} makes the mean symmetric up to Monte
  // Carlo noise; its spectrum equals the mean's.
  Eigen::VectorXd sqrt_vals = ctx.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd root = ctx.eigenvectors() * sqrt_vals.asDiagonal() *
                               ctx.eigenvectors().transpose();
  const Eigen::MatrixXd balanced = root * mean * ctx.inverse_sqrt();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (balanced + balanced.transpose()));
  const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double cutoff = ctx.rank_tolerance() * top;
  double smallest = -1;
  for (int i = 0; i < eig.eigenvalues().size(); ++i) {
    const double value = eig.eigenvalues()[i];
    if (value > cutoff && (smallest < 0 || value < smallest)) smallest = value;
  }
  if (smallest <= 0) {
    throw std::runtime_error(
        "estimate_rho: no positive eigenvalue in the sampled mean");
  }
  return std::min(smallest, 1.0);
}

}  // namespace sgn
