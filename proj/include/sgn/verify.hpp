#pragma once

#include <string>
#include <vector>

namespace sgn::verify {

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Update-form agreement: damped Newton, sketch-and-project and the
// brute-force model argmin land on the same iterate.
CriterionResult update_forms_equivalence();
// Stepsize root residual, range (0,1] and the sqrt(2/c) upper bound.
CriterionResult stepsize_correctness();
// Projection idempotency, the Pythagoras split, and the whitened-sketch
// expectations (mean projection, quadratic and cubic contractions).
CriterionResult projection_suite();
// Monotone f-trace and the per-step decrease lower bound.
CriterionResult monotone_and_one_step_decrease();
// Replication-mean suboptimality under the global k^-2 envelope.
CriterionResult global_envelope();
// Ensemble mean under the local linear envelope from a warm start.
CriterionResult local_linear_envelope();
// One damped full-space step solves a quadratic.
CriterionResult quadratic_one_step();
// Trajectories commute with invertible reparameterizations.
CriterionResult affine_invariance();
// Conditioning estimate of the expected stepsize-weighted projection.
CriterionResult rho_sanity();
// Cubic subproblem stationarity plus the sgn/sscn iteration-count parity.
CriterionResult sscn_subsolver_and_comparability();
// Text-format round trip and malformed-input rejection.
CriterionResult libsvm_roundtrip();

// suite: "equivalence" | "envelope" | "local" | "rho" | "all"
std::vector<CriterionResult> run_suite(const std::string& suite);

}  // namespace sgn::verify
