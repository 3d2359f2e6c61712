#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "sgn/harness.hpp"
#include "sgn/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sgn: sketched Newton solvers and experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string param = "l_alg";
  std::vector<double> grid;
  std::string suite = "all";

  CLI::App* run_cmd = app.add_subcommand("run", "run a configured experiment");
  run_cmd->add_option("--config", config_path, "experiment config file")
      ->required();

  CLI::App* tune_cmd =
      app.add_subcommand("tune", "grid-search one smoothness constant");
  tune_cmd->add_option("--config", config_path, "experiment config file")
      ->required();
  tune_cmd->add_option("--param", param, "l_alg | l_hat | sigma | l_s");
  tune_cmd->add_option("--grid", grid, "candidate values")->required();

  CLI::App* fstar_cmd = app.add_subcommand(
      "fstar", "compute the reference optimum of the configured objective");
  fstar_cmd->add_option("--config", config_path, "experiment config file")
      ->required();

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run a verification suite");
  verify_cmd->add_option("--suite", suite,
                         "equivalence | envelope | local | rho | all");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const sgn::ExperimentConfig config = sgn::load_config(config_path);
      const sgn::ExperimentSummary summary = sgn::run_experiment(config);
      std::printf("f_star %.17g\n", summary.f_star);
      if (!summary.mean_subopt.empty()) {
        std::printf("final mean suboptimality %.17g over %zu iterations\n",
                    summary.mean_subopt.back(),
                    summary.mean_subopt.size() - 1);
        std::printf("log-log rate slope %.4f on k in [%d,%d]\n",
                    summary.rate.slope, summary.rate_k_lo, summary.rate_k_hi);
      }
      int failures = 0;
      for (const std::string& message : summary.failures) {
        if (!message.empty()) ++failures;
      }
      if (failures > 0) {
        std::printf("%d replication(s) failed; see failures.txt\n", failures);
      }
      std::printf("traces written to %s\n", config.out_dir.c_str());
    } else if (*tune_cmd) {
      const sgn::ExperimentConfig config = sgn::load_config(config_path);
      const double best = sgn::tune_constant(config, grid, param);
      std::printf("best %s = %.17g\n", param.c_str(), best);
    } else if (*fstar_cmd) {
      const sgn::ExperimentConfig config = sgn::load_config(config_path);
      const sgn::ExperimentSetup setup = sgn::prepare_experiment(config);
      const sgn::FStarResult result = sgn::compute_fstar(*setup.oracle);
      std::printf("f_star %.17g after %d iterations\n", result.f_star,
                  result.iterations);
    } else if (*verify_cmd) {
      bool all_passed = true;
      for (const auto& result : sgn::verify::run_suite(suite)) {
        std::printf("[%s] %s: %s\n", result.passed ? "PASS" : "FAIL",
                    result.name.c_str(), result.detail.c_str());
        all_passed = all_passed && result.passed;
      }
      return all_passed ? 0 : 1;
    }
  } catch (const std::exception& error) {
    std::fprintf(stderr, "error: %s\n", error.what());
    return 1;
  }
  return 0;
}
