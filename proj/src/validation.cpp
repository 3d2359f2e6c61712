#include "sgn/validation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sgn/geometry.hpp"
#include "sgn/solvers.hpp"

namespace sgn {

Eigen::VectorXd fd_gradient(const ObjectiveOracle& oracle,
                            const Eigen::VectorXd& x, double step) {
  if (!(step > 0)) throw std::invalid_argument("fd_gradient: step must be > 0");
  const int d = oracle.dimension();
  Eigen::VectorXd grad(d);
  Eigen::VectorXd probe = x;
  for (int i = 0; i < d; ++i) {
    probe[i] = x[i] + step;
    const double forward = oracle.value(probe);
    probe[i] = x[i] - step;
    const double backward = oracle.value(probe);
    probe[i] = x[i];
    grad[i] = (forward - backward) / (2.0 * step);
  }
  return grad;
}

Eigen::MatrixXd fd_hessian(const ObjectiveOracle& oracle,
                           const Eigen::VectorXd& x, double step) {
  if (!(step > 0)) throw std::invalid_argument("fd_hessian: step must be > 0");
  const int d = oracle.dimension();
  Eigen::MatrixXd hess(d, d);
  Eigen::VectorXd probe = x;
  for (int i = 0; i < d; ++i) {
    probe[i] = x[i] + step;
    const Eigen::VectorXd forward = oracle.gradient(probe);
    probe[i] = x[i] - step;
    const Eigen::VectorXd backward = oracle.gradient(probe);
    probe[i] = x[i];
    hess.col(i) = (forward - backward) / (2.0 * step);
  }
  return 0.5 * (hess + hess.transpose());
}

double fd_default_step(const Eigen::VectorXd& x) {
  const double scale = x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
  return std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + scale);
}

namespace {

// Golden-section sweep of one coordinate of the model over [lo, hi].
double golden_coordinate(const std::function<double(double)>& objective,
                         double lo, double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  for (int i = 0; i < 90; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = objective(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Eigen::VectorXd brute_model_argmin(const ObjectiveOracle& oracle,
                                   const Eigen::VectorXd& x,
                                   const SketchMatrix& sketch, double l_alg,
                                   int grid, int refine_iters) {
  const int tau = static_cast<int>(sketch.matrix.cols());
  if (tau > 2) {
    throw std::invalid_argument(
        "brute_model_argmin: grid search supports tau <= 2");
  }
  if (grid < 3) throw std::invalid_argument("brute_model_argmin: grid too small");
  const Eigen::VectorXd g_s = oracle.sketched_gradient(x, sketch.matrix);
  const Eigen::MatrixXd h_s = oracle.sketched_hessian(x, sketch.matrix);
  const GeometryContext ctx(h_s);

  const auto model = [&](const Eigen::VectorXd& h) {
    const double quad = std::max(h.dot(h_s * h), 0.0);
    const double norm = std::sqrt(quad);
    return g_s.dot(h) + 0.5 * quad + l_alg / 6.0 * norm * norm * norm;
  };
  const auto stationarity = [&](const Eigen::VectorXd& h) {
    const double norm = std::sqrt(std::max(h.dot(h_s * h), 0.0));
    const Eigen::VectorXd grad =
        g_s + h_s * h + 0.5 * l_alg * norm * (h_s * h);
    return grad.norm();
  };

  // The cubic regularizer only shrinks the unregularized subspace Newton
  // step, so 4x its norm bounds the minimizer with margin.
  const double box =
      4.0 * ctx.apply_pseudo_inverse(g_s).norm() + 1e-12;
  Eigen::VectorXd best = Eigen::VectorXd::Zero(tau);
  double best_value = model(best);
  Eigen::VectorXd h(tau);
  if (tau == 1) {
    for (int i = 0; i < grid; ++i) {
      h[0] = -box + 2.0 * box * i / (grid - 1);
      if (const double v = model(h); v < best_value) {
        best_value = v;
        best = h;
      }
    }
  } else {
    for (int i = 0; i < grid; ++i) {
      h[0] = -box + 2.0 * box * i / (grid - 1);
      for (int j = 0; j < grid; ++j) {
        h[1] = -box + 2.0 * box * j / (grid - 1);
        if (const double v = model(h); v < best_value) {
          best_value = v;
          best = h;
        }
      }
    }
  }

  for (int sweep = 0; sweep < refine_iters; ++sweep) {
    for (int j = 0; j < tau; ++j) {
      Eigen::VectorXd probe = best;
      const double center = best[j];
      best[j] = golden_coordinate(
          [&](double t) {
            probe[j] = t;
            return model(probe);
          },
          center - box, center + box);
    }
    // Well below the 1e-6 contract so the returned point is usable as a
    // reference in equivalence comparisons.
    if (stationarity(best) <= 1e-10 * (1.0 + g_s.norm())) break;
  }
  return best;
}

McExpectation mc_expectation(
    const std::function<Eigen::MatrixXd(CounterRng&)>& statistic, int samples,
    std::uint64_t seed) {
  if (samples < 2) {
    throw std::invalid_argument("mc_expectation: needs at least 2 samples");
  }
  Eigen::MatrixXd mean, m2;
  for (int i = 0; i < samples; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i) + 1);
    const Eigen::MatrixXd value = statistic(rng);
    if (i == 0) {
      mean = value;
      m2 = Eigen::MatrixXd::Zero(value.rows(), value.cols());
      continue;
    }
    // Welford update
    const Eigen::MatrixXd delta = value - mean;
    mean += delta / (i + 1);
    m2 += delta.cwiseProduct(value - mean);
  }
  McExpectation out;
  out.samples = samples;
  out.mean = mean;
  out.standard_error =
      (m2 / (static_cast<double>(samples) - 1.0) / samples).cwiseSqrt();
  return out;
}

bool neighborhood_check(const ObjectiveOracle& oracle, const Eigen::VectorXd& x,
                        double l_sc, double gamma) {
  if (!(l_sc > 0)) {
    throw std::invalid_argument("neighborhood_check: l_sc must be positive");
  }
  if (!(gamma > 0)) {
    throw std::invalid_argument("neighborhood_check: gamma must be positive");
  }
  const GeometryContext ctx(oracle.hessian(x));
  const double threshold = 2.0 / ((1.0 + 1.0 / gamma) * l_sc);
  return dual_norm(ctx, oracle.gradient(x)) < threshold;
}

}  // namespace sgn
