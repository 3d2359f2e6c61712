#include "sgn/objectives.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sgn/rng.hpp"

namespace sgn {

namespace {

// log(1 + exp(t)) without overflow
double softplus(double t) {
  return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
  return t >= 0 ? 1.0 / (1.0 + std::exp(-t))
                : std::exp(t) / (1.0 + std::exp(t));
}

Eigen::VectorXd probe_point(const ProbeRegion& region, int dimension,
                            CounterRng& rng) {
  Eigen::VectorXd x = region.center.size() > 0
                          ? region.center
                          : Eigen::VectorXd::Zero(dimension);
  if (x.size() != dimension) {
    throw std::invalid_argument("probe region center has wrong dimension");
  }
  if (region.radius > 0) {
    for (int i = 0; i < dimension; ++i) x[i] += region.radius * rng.normal();
  }
  return x;
}

}  // namespace

void ObjectiveOracle::check_dimension(const Eigen::VectorXd& x) const {
  if (x.size() != dimension()) {
    throw std::invalid_argument("oracle: point has wrong dimension");
  }
}

Eigen::VectorXd ObjectiveOracle::sketched_gradient(
    const Eigen::VectorXd& x, const Eigen::MatrixXd& sketch) const {
  return sketch.transpose() * gradient(x);
}

Eigen::MatrixXd ObjectiveOracle::sketched_hessian(
    const Eigen::VectorXd& x, const Eigen::MatrixXd& sketch) const {
  return sketch.transpose() * hessian(x) * sketch;
}

double ObjectiveOracle::hessian_quadratic_form(const Eigen::VectorXd& x,
                                               const Eigen::VectorXd& v) const {
  return v.dot(hessian(x) * v);
}

Quadratic::Quadratic(Eigen::MatrixXd a, Eigen::VectorXd b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size()) {
    throw std::invalid_argument("Quadratic: shape mismatch");
  }
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * a_.cwiseAbs().maxCoeff()) {
    throw std::invalid_argument("Quadratic: matrix must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(a_);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("Quadratic: matrix must be positive definite");
  }
}

double Quadratic::value(const Eigen::VectorXd& x) const {
  check_dimension(x);
  return 0.5 * x.dot(a_ * x) - b_.dot(x);
}

Eigen::VectorXd Quadratic::gradient(const Eigen::VectorXd& x) const {
  check_dimension(x);
  return a_ * x - b_;
}

Eigen::MatrixXd Quadratic::hessian(const Eigen::VectorXd& x) const {
  check_dimension(x);
  return a_;
}

double Quadratic::hessian_quadratic_form(const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& v) const {
  check_dimension(x);
  return v.dot(a_ * v);
}

Eigen::VectorXd Quadratic::minimizer() const { return a_.llt().solve(b_); }

double Quadratic::minimum() const { return -0.5 * b_.dot(minimizer()); }

LogisticRegression::LogisticRegression(Dataset data, double reg)
    : data_(std::move(data)), reg_(reg) {
  if (reg_ < 0) {
    throw std::invalid_argument("LogisticRegression: regularization must be >= 0");
  }
  if (data_.d < 1) {
    throw std::invalid_argument("LogisticRegression: feature dimension must be >= 1");
  }
  for (int i = 0; i < data_.n; ++i) {
    if (data_.labels[i] != 1.0 && data_.labels[i] != -1.0) {
      throw std::invalid_argument(
          "LogisticRegression: labels must be in {-1,+1}");
    }
  }
}

double LogisticRegression::default_regularization(const Dataset& data) {
  if (data.n == 0) return 1e-3;
  return 1e-3 * data.features.squaredNorm() / data.n;
}

Eigen::VectorXd LogisticRegression::margins(const Eigen::VectorXd& x) const {
  return data_.labels.cwiseProduct(data_.features * x);
}

Eigen::VectorXd LogisticRegression::hessian_weights(
    const Eigen::VectorXd& x) const {
  const Eigen::VectorXd t = margins(x);
  Eigen::VectorXd w(data_.n);
  for (int i = 0; i < data_.n; ++i) {
    const double s = sigmoid(t[i]);
    w[i] = s * (1.0 - s);
  }
  return w;
}

double LogisticRegression::value(const Eigen::VectorXd& x) const {
  check_dimension(x);
  const Eigen::VectorXd t = margins(x);
  double sum = 0.0;
  for (int i = 0; i < data_.n; ++i) sum += softplus(-t[i]);
  return sum / std::max(data_.n, 1) + 0.5 * reg_ * x.squaredNorm();
}

Eigen::VectorXd LogisticRegression::gradient(const Eigen::VectorXd& x) const {
  check_dimension(x);
  const Eigen::VectorXd t = margins(x);
  Eigen::VectorXd coeff(data_.n);
  for (int i = 0; i < data_.n; ++i) {
    coeff[i] = -data_.labels[i] * (1.0 - sigmoid(t[i]));
  }
  return data_.features.transpose() * coeff / std::max(data_.n, 1) + reg_ * x;
}

Eigen::MatrixXd LogisticRegression::hessian(const Eigen::VectorXd& x) const {
  check_dimension(x);
  const Eigen::VectorXd w = hessian_weights(x);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(data_.d, data_.d);
  // A^T diag(w) A assembled row by row to keep the sparse structure.
  for (int i = 0; i < data_.n; ++i) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
             data_.features, i);
         it; ++it) {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator jt(
               data_.features, i);
           jt; ++jt) {
        h(it.col(), jt.col()) += w[i] * it.value() * jt.value();
      }
    }
  }
  h /= std::max(data_.n, 1);
  h += reg_ * Eigen::MatrixXd::Identity(data_.d, data_.d);
  return h;
}

Eigen::VectorXd LogisticRegression::sketched_gradient(
    const Eigen::VectorXd& x, const Eigen::MatrixXd& sketch) const {
  check_dimension(x);
  return sketch.transpose() * gradient(x);
}

Eigen::MatrixXd LogisticRegression::sketched_hessian(
    const Eigen::VectorXd& x, const Eigen::MatrixXd& sketch) const {
  check_dimension(x);
  // (A S)^T diag(w) (A S) / n + reg S^T S without the d x d Hessian.
  const Eigen::MatrixXd as = data_.features * sketch;
  const Eigen::VectorXd w = hessian_weights(x);
  return as.transpose() * w.asDiagonal() * as / std::max(data_.n, 1) +
         reg_ * sketch.transpose() * sketch;
}

double LogisticRegression::hessian_quadratic_form(
    const Eigen::VectorXd& x, const Eigen::VectorXd& v) const {
  check_dimension(x);
  const Eigen::VectorXd av = data_.features * v;
  const Eigen::VectorXd w = hessian_weights(x);
  return av.dot(w.asDiagonal() * av) / std::max(data_.n, 1) +
         reg_ * v.squaredNorm();
}

double LogisticRegression::hessian_lipschitz_l2() const {
  // |w'(t)| <= 1/(6 sqrt(3)) for the sigmoid curvature weight w = s(1-s).
  double sum = 0.0;
  for (int i = 0; i < data_.n; ++i) {
    const double norm = data_.features.row(i).norm();
    sum += norm * norm * norm;
  }
  return sum / (6.0 * std::sqrt(3.0) * std::max(data_.n, 1));
}

double LogisticRegression::relative_smoothness_bound() const {
  if (!(reg_ > 0)) {
    throw std::logic_error(
        "relative_smoothness_bound: needs a positive ridge term");
  }
  const Eigen::MatrixXd gram =
      Eigen::MatrixXd(data_.features.transpose() * data_.features) /
      std::max(data_.n, 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  return (0.25 * eig.eigenvalues().maxCoeff() + reg_) / reg_;
}

Eigen::VectorXd LogisticRegression::coordinate_lipschitz() const {
  Eigen::VectorXd out = Eigen::VectorXd::Constant(data_.d, reg_);
  for (int i = 0; i < data_.n; ++i) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
             data_.features, i);
         it; ++it) {
      out[it.col()] += 0.25 * it.value() * it.value() / std::max(data_.n, 1);
    }
  }
  return out;
}

LogSumExp::LogSumExp(Eigen::MatrixXd rows, Eigen::VectorXd shifts, double scale)
    : rows_(std::move(rows)), shifts_(std::move(shifts)), scale_(scale) {
  if (rows_.rows() < 2) {
    throw std::invalid_argument("LogSumExp: needs at least 2 rows");
  }
  if (rows_.rows() != shifts_.size()) {
    throw std::invalid_argument("LogSumExp: shifts/rows mismatch");
  }
  if (!(scale_ > 0)) {
    throw std::invalid_argument("LogSumExp: scale must be positive");
  }
}

Eigen::VectorXd LogSumExp::softmax(const Eigen::VectorXd& x) const {
  Eigen::VectorXd z = (rows_ * x + shifts_) / scale_;
  const double zmax = z.maxCoeff();
  Eigen::VectorXd p = (z.array() - zmax).exp();
  return p / p.sum();
}

double LogSumExp::value(const Eigen::VectorXd& x) const {
  check_dimension(x);
  Eigen::VectorXd z = (rows_ * x + shifts_) / scale_;
  const double zmax = z.maxCoeff();
  return scale_ * (zmax + std::log((z.array() - zmax).exp().sum()));
}

Eigen::VectorXd LogSumExp::gradient(const Eigen::VectorXd& x) const {
  check_dimension(x);
  return rows_.transpose() * softmax(x);
}

Eigen::MatrixXd LogSumExp::hessian(const Eigen::VectorXd& x) const {
  check_dimension(x);
  const Eigen::VectorXd p = softmax(x);
  const Eigen::VectorXd ap = rows_.transpose() * p;
  return (rows_.transpose() * p.asDiagonal() * rows_ - ap * ap.transpose()) /
         scale_;
}

double LogSumExp::hessian_quadratic_form(const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& v) const {
  check_dimension(x);
  const Eigen::VectorXd p = softmax(x);
  const Eigen::VectorXd u = rows_ * v;
  const double mean = p.dot(u);
  return (p.dot(u.cwiseProduct(u)) - mean * mean) / scale_;
}

AffinePullback::AffinePullback(const ObjectiveOracle& base, Eigen::MatrixXd map)
    : base_(&base), map_(std::move(map)) {
  if (map_.rows() != base.dimension() || map_.cols() != base.dimension()) {
    throw std::invalid_argument("AffinePullback: map must be d x d");
  }
}

double AffinePullback::value(const Eigen::VectorXd& y) const {
  check_dimension(y);
  return base_->value(map_ * y);
}

Eigen::VectorXd AffinePullback::gradient(const Eigen::VectorXd& y) const {
  check_dimension(y);
  return map_.transpose() * base_->gradient(map_ * y);
}

Eigen::MatrixXd AffinePullback::hessian(const Eigen::VectorXd& y) const {
  check_dimension(y);
  return map_.transpose() * base_->hessian(map_ * y) * map_;
}

double estimate_semi_strong(double hessian_lipschitz, double strong_convexity) {
  if (hessian_lipschitz < 0) {
    throw std::invalid_argument("estimate_semi_strong: l2 must be >= 0");
  }
  if (!(strong_convexity > 0)) {
    throw std::invalid_argument("estimate_semi_strong: mu must be positive");
  }
  return hessian_lipschitz / std::pow(strong_convexity, 1.5);
}

double empirical_ls(const ObjectiveOracle& oracle,
                    const SketchDistribution& dist, int probes,
                    const ProbeRegion& region, std::uint64_t seed) {
  if (probes < 1) throw std::invalid_argument("empirical_ls: probes must be >= 1");
  const int d = oracle.dimension();
  if (dist.dimension() != d) {
    throw std::invalid_argument("empirical_ls: distribution dimension mismatch");
  }
  const double eps_cbrt = std::cbrt(std::numeric_limits<double>::epsilon());
  double best = 0.0;
  for (int probe = 0; probe < probes; ++probe) {
    CounterRng rng(seed, static_cast<std::uint64_t>(probe) + 1);
    const Eigen::VectorXd x = probe_point(region, d, rng);
    const SketchMatrix s = sample(dist, static_cast<std::uint64_t>(probe));
    Eigen::VectorXd h(s.rank);
    for (int i = 0; i < s.rank; ++i) h[i] = rng.normal();
    const Eigen::VectorXd u = s.matrix * h;
    const double local = std::sqrt(
        std::max(oracle.hessian_quadratic_form(x, u), 0.0));
    if (local == 0.0) continue;
    // D^3 f(x)[u]^3 = d/ds [u^T hess f(x + s u) u] at s = 0.
    const double step =
        eps_cbrt * (1.0 + x.cwiseAbs().maxCoeff()) /
        std::max(u.cwiseAbs().maxCoeff(), 1e-300);
    const double forward = oracle.hessian_quadratic_form(x + step * u, u);
    const double backward = oracle.hessian_quadratic_form(x - step * u, u);
    const double third = (forward - backward) / (2.0 * step);
    best = std::max(best, std::abs(third) / (local * local * local));
  }
  return best;
}

double empirical_hessian_lipschitz(const ObjectiveOracle& oracle, int probes,
                                   const ProbeRegion& region,
                                   std::uint64_t seed) {
  if (probes < 1) {
    throw std::invalid_argument("empirical_hessian_lipschitz: probes must be >= 1");
  }
  const int d = oracle.dimension();
  double best = 0.0;
  for (int probe = 0; probe < probes; ++probe) {
    CounterRng rng(seed, static_cast<std::uint64_t>(probe) + 1);
    const Eigen::VectorXd x = probe_point(region, d, rng);
    const Eigen::VectorXd y = probe_point(region, d, rng);
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    const Eigen::MatrixXd diff = oracle.hessian(x) - oracle.hessian(y);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        0.5 * (diff + diff.transpose()));
    best = std::max(best, eig.eigenvalues().cwiseAbs().maxCoeff() / dist);
  }
  return best;
}

double empirical_strong_convexity(const ObjectiveOracle& oracle, int probes,
                                  const ProbeRegion& region,
                                  std::uint64_t seed) {
  if (probes < 1) {
    throw std::invalid_argument("empirical_strong_convexity: probes must be >= 1");
  }
  const int d = oracle.dimension();
  double worst = std::numeric_limits<double>::infinity();
  for (int probe = 0; probe < probes; ++probe) {
    CounterRng rng(seed, static_cast<std::uint64_t>(probe) + 1);
    const Eigen::VectorXd x = probe_point(region, d, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(oracle.hessian(x));
    worst = std::min(worst, eig.eigenvalues().minCoeff());
  }
  return worst;
}

}  // namespace sgn
