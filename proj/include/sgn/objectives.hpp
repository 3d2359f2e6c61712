#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>

#include "sgn/data_io.hpp"
#include "sgn/sketching.hpp"

namespace sgn {

// Twice-differentiable convex test function exposing full and sketched
// derivative oracles. Implementations are immutable and safe for concurrent
// evaluation.
class ObjectiveOracle {
 public:
  virtual ~ObjectiveOracle() = default;

  virtual int dimension() const = 0;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const = 0;

  // S^T grad f(x); tau-vector.
  virtual Eigen::VectorXd sketched_gradient(const Eigen::VectorXd& x,
                                            const Eigen::MatrixXd& sketch) const;
  // S^T hess f(x) S; tau x tau, assembled without the d x d Hessian where the
  // structure allows.
  virtual Eigen::MatrixXd sketched_hessian(const Eigen::VectorXd& x,
                                           const Eigen::MatrixXd& sketch) const;
  // v^T hess f(x) v without materializing the Hessian.
  virtual double hessian_quadratic_form(const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& v) const;

 protected:
  void check_dimension(const Eigen::VectorXd& x) const;
};

// f(x) = 1/2 x^T A x - b^T x for symmetric positive definite A.
class Quadratic : public ObjectiveOracle {
 public:
  Quadratic(Eigen::MatrixXd a, Eigen::VectorXd b);

  int dimension() const override { return static_cast<int>(b_.size()); }
  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override;
  double hessian_quadratic_form(const Eigen::VectorXd& x,
                                const Eigen::VectorXd& v) const override;

  Eigen::VectorXd minimizer() const;
  double minimum() const;

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
};

// f(x) = 1/n sum_i log(1 + exp(-b_i <a_i, x>)) + reg/2 ||x||^2.
class LogisticRegression : public ObjectiveOracle {
 public:
  LogisticRegression(Dataset data, double reg);

  int dimension() const override { return data_.d; }
  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd sketched_gradient(const Eigen::VectorXd& x,
                                    const Eigen::MatrixXd& sketch) const override;
  Eigen::MatrixXd sketched_hessian(const Eigen::VectorXd& x,
                                   const Eigen::MatrixXd& sketch) const override;
  double hessian_quadratic_form(const Eigen::VectorXd& x,
                                const Eigen::VectorXd& v) const override;

  double regularization() const { return reg_; }
  const Dataset& data() const { return data_; }

  // reg_default = 1e-3 * mean squared feature norm; keeps the loss strongly
  // convex so the relative-convexity suites have mu > 0.
  static double default_regularization(const Dataset& data);

  // Closed-form l2 Hessian-Lipschitz bound (1/(6 sqrt(3) n)) sum ||a_i||^3.
  double hessian_lipschitz_l2() const;
  // Strong convexity modulus (= the ridge term).
  double strong_convexity() const { return reg_; }
  // Upper bound on the relative smoothness constant in every sketched
  // subspace: (lambda_max(A^T A)/(4n) + reg) / reg.
  double relative_smoothness_bound() const;
  // Per-coordinate curvature bounds (1/(4n)) sum_i a_ij^2 + reg.
  Eigen::VectorXd coordinate_lipschitz() const;

 private:
  Eigen::VectorXd margins(const Eigen::VectorXd& x) const;  // b_i <a_i, x>
  Eigen::VectorXd hessian_weights(const Eigen::VectorXd& x) const;

  Dataset data_;
  double reg_;
};

// f(x) = t log sum_i exp((<a_i, x> + c_i)/t), max-shifted against overflow.
class LogSumExp : public ObjectiveOracle {
 public:
  LogSumExp(Eigen::MatrixXd rows, Eigen::VectorXd shifts, double scale);

  int dimension() const override { return static_cast<int>(rows_.cols()); }
  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override;
  double hessian_quadratic_form(const Eigen::VectorXd& x,
                                const Eigen::VectorXd& v) const override;

 private:
  Eigen::VectorXd softmax(const Eigen::VectorXd& x) const;

  Eigen::MatrixXd rows_;
  Eigen::VectorXd shifts_;
  double scale_;
};

// phi(y) = f(A y) for an invertible map A; used by the affine-invariance
// suites. Holds a reference: the base oracle must outlive the pullback.
class AffinePullback : public ObjectiveOracle {
 public:
  AffinePullback(const ObjectiveOracle& base, Eigen::MatrixXd map);

  int dimension() const override { return base_->dimension(); }
  double value(const Eigen::VectorXd& y) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& y) const override;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& y) const override;

 private:
  const ObjectiveOracle* base_;
  Eigen::MatrixXd map_;
};

// Smoothness quantities consumed by the solvers. l_alg is the constant the
// stepsize rule actually uses; the rest are estimates of the underlying
// function class constants and satisfy l_sc <= l_semi <= l2/mu^{3/2}.
struct SmoothnessEstimates {
  double l_alg = 0;    // stepsize constant, must upper-bound l_semi
  double l_semi = 0;   // semi-strong self-concordance estimate
  double l_sc = 0;     // plain self-concordance estimate
  double l_s_sup = 0;  // sup over sketches of the in-range constant L_S
  double l_hat = 0;    // relative smoothness
  double mu_hat = 0;   // relative convexity
};

// l2 / mu^{3/2}: upper bound on the semi-strong self-concordance constant of
// a mu-strongly convex function with l2-Lipschitz Hessian.
double estimate_semi_strong(double hessian_lipschitz, double strong_convexity);

struct ProbeRegion {
  Eigen::VectorXd center;  // empty = origin
  double radius = 1.0;     // Gaussian scatter around the center; 0 = pinned
};

// Empirical lower bound on the self-concordance constant along sketched
// directions: max over sampled (x, S, h) of |D^3 f(x)[Sh]^3| / ||Sh||_x^3,
// with the third derivative taken by central differences of the Hessian
// quadratic form. Probes with ||Sh||_x = 0 are skipped. Monotone
// nondecreasing in `probes` for a fixed seed.
double empirical_ls(const ObjectiveOracle& oracle,
                    const SketchDistribution& dist, int probes,
                    const ProbeRegion& region = {}, std::uint64_t seed = 0);

// Empirical max of ||hess f(x) - hess f(y)||_2 / ||x - y||_2 over sampled
// pairs; feeds estimate_semi_strong for oracles without closed-form bounds.
double empirical_hessian_lipschitz(const ObjectiveOracle& oracle, int probes,
                                   const ProbeRegion& region = {},
                                   std::uint64_t seed = 0);

// Empirical min eigenvalue of the Hessian over sampled points.
double empirical_strong_convexity(const ObjectiveOracle& oracle, int probes,
                                  const ProbeRegion& region = {},
                                  std::uint64_t seed = 0);

}  // namespace sgn
