#include "sgn/geometry.hpp"

#include <cmath>
#include <sstream>

namespace sgn {

namespace {

void check_symmetric(const Eigen::MatrixXd& m, double rel_tol,
                     const char* where) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(where) + ": matrix must be square");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > rel_tol * scale) {
    std::ostringstream msg;
    msg << where << ": matrix asymmetry " << asym << " exceeds " << rel_tol
        << " relative tolerance";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double rel_tol) {
  check_symmetric(m, 1e-12, "pseudo_inverse");
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double cutoff = rel_tol * std::max(values.cwiseAbs().maxCoeff(), 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(values.size());
  for (int i = 0; i < values.size(); ++i) {
    if (values[i] > cutoff) inv[i] = 1.0 / values[i];
  }
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

GeometryContext::GeometryContext(const Eigen::MatrixXd& hessian,
                                 double rank_tolerance)
    : rank_tolerance_(rank_tolerance) {
  check_symmetric(hessian, 1e-12, "GeometryContext");
  hessian_ = 0.5 * (hessian + hessian.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian_);
  eigenvalues_ = eig.eigenvalues();
  eigenvectors_ = eig.eigenvectors();
  const double lambda_max = std::max(eigenvalues_.cwiseAbs().maxCoeff(), 0.0);
  cutoff_ = rank_tolerance_ * lambda_max;
  rank_ = 0;
  for (int i = 0; i < eigenvalues_.size(); ++i) {
    if (eigenvalues_[i] > cutoff_) ++rank_;
  }
}

Eigen::VectorXd GeometryContext::apply_pseudo_inverse(
    const Eigen::VectorXd& v) const {
  if (v.size() != dimension()) {
    throw std::invalid_argument("apply_pseudo_inverse: dimension mismatch");
  }
  Eigen::VectorXd coeffs = eigenvectors_.transpose() * v;
  for (int i = 0; i < coeffs.size(); ++i) {
    coeffs[i] = eigenvalues_[i] > cutoff_ ? coeffs[i] / eigenvalues_[i] : 0.0;
  }
  return eigenvectors_ * coeffs;
}

Eigen::MatrixXd GeometryContext::pseudo_inverse_matrix() const {
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(eigenvalues_.size());
  for (int i = 0; i < eigenvalues_.size(); ++i) {
    if (eigenvalues_[i] > cutoff_) inv[i] = 1.0 / eigenvalues_[i];
  }
  return eigenvectors_ * inv.asDiagonal() * eigenvectors_.transpose();
}

Eigen::MatrixXd GeometryContext::inverse_sqrt() const {
  if (!positive_definite()) {
    throw std::invalid_argument(
        "inverse_sqrt: matrix is singular within rank tolerance, inverse "
        "square root undefined");
  }
  Eigen::VectorXd inv(eigenvalues_.size());
  for (int i = 0; i < eigenvalues_.size(); ++i) {
    inv[i] = 1.0 / std::sqrt(eigenvalues_[i]);
  }
  return eigenvectors_ * inv.asDiagonal() * eigenvectors_.transpose();
}

double local_norm(const GeometryContext& ctx, const Eigen::VectorXd& v) {
  if (v.size() != ctx.dimension()) {
    throw std::invalid_argument("local_norm: dimension mismatch");
  }
  // Quadratic form through the factorization; clamps the tiny negative
  // values the null-space components can produce in floating point.
  const Eigen::VectorXd coeffs = ctx.eigenvectors().transpose() * v;
  double sum = 0.0;
  for (int i = 0; i < coeffs.size(); ++i) {
    sum += std::max(ctx.eigenvalues()[i], 0.0) * coeffs[i] * coeffs[i];
  }
  return std::sqrt(std::max(sum, 0.0));
}

double dual_norm(const GeometryContext& ctx, const Eigen::VectorXd& g) {
  if (g.size() != ctx.dimension()) {
    throw std::invalid_argument("dual_norm: dimension mismatch");
  }
  if (!range_check(ctx, g)) {
    throw RangeViolation(
        "dual_norm: vector has a component outside the range of the matrix; "
        "the step equivalence requires the gradient to lie in the Hessian "
        "column space");
  }
  const Eigen::VectorXd coeffs = ctx.eigenvectors().transpose() * g;
  double sum = 0.0;
  const double cutoff =
      ctx.rank_tolerance() *
      std::max(ctx.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
  for (int i = 0; i < coeffs.size(); ++i) {
    if (ctx.eigenvalues()[i] > cutoff) {
      sum += coeffs[i] * coeffs[i] / ctx.eigenvalues()[i];
    }
  }
  return std::sqrt(std::max(sum, 0.0));
}

bool range_check(const GeometryContext& ctx, const Eigen::VectorXd& g) {
  if (g.size() != ctx.dimension()) {
    throw std::invalid_argument("range_check: dimension mismatch");
  }
  const double norm = g.norm();
  if (norm == 0.0) return true;
  // Out-of-range component = projection of g onto the discarded eigenspace.
  const double cutoff =
      ctx.rank_tolerance() *
      std::max(ctx.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
  const Eigen::VectorXd coeffs = ctx.eigenvectors().transpose() * g;
  double out = 0.0;
  for (int i = 0; i < coeffs.size(); ++i) {
    if (ctx.eigenvalues()[i] <= cutoff) out += coeffs[i] * coeffs[i];
  }
  return std::sqrt(out) <= ctx.rank_tolerance() * norm;
}

ProjectionOperator::ProjectionOperator(const GeometryContext& geometry,
                                       Eigen::MatrixXd sketch)
    : geometry_(&geometry), sketch_(std::move(sketch)) {
  if (sketch_.rows() != geometry.dimension()) {
    throw std::invalid_argument("ProjectionOperator: sketch has wrong row count");
  }
  if (sketch_.cols() < 1) {
    throw std::invalid_argument("ProjectionOperator: sketch needs >= 1 column");
  }
  const int d = geometry.dimension();
  // A full-rank geometry with S = I projects onto everything; shortcut to
  // the exact identity instead of round-tripping the factorization.
  if (sketch_.cols() == d && geometry.positive_definite() &&
      sketch_.isIdentity(0.0)) {
    identity_shortcut_ = true;
    if (d <= kDenseLimit) matrix_ = Eigen::MatrixXd::Identity(d, d);
    return;
  }
  const Eigen::MatrixXd gram =
      sketch_.transpose() * geometry.hessian() * sketch_;
  core_ = pseudo_inverse(0.5 * (gram + gram.transpose()),
                         geometry.rank_tolerance());
  if (d <= kDenseLimit) {
    matrix_ = sketch_ * core_ * sketch_.transpose() * geometry.hessian();
  }
}

Eigen::VectorXd ProjectionOperator::apply(const Eigen::VectorXd& h) const {
  if (h.size() != geometry_->dimension()) {
    throw std::invalid_argument("ProjectionOperator::apply: dimension mismatch");
  }
  if (identity_shortcut_) return h;
  return sketch_ * (core_ * (sketch_.transpose() * (geometry_->hessian() * h)));
}

Eigen::VectorXd ProjectionOperator::apply_transpose(
    const Eigen::VectorXd& g) const {
  if (g.size() != geometry_->dimension()) {
    throw std::invalid_argument(
        "ProjectionOperator::apply_transpose: dimension mismatch");
  }
  if (identity_shortcut_) return g;
  return geometry_->hessian() * (sketch_ * (core_ * (sketch_.transpose() * g)));
}

const Eigen::MatrixXd& ProjectionOperator::matrix() const {
  if (!matrix_) {
    throw std::logic_error(
        "ProjectionOperator::matrix: dense realization is only kept for "
        "dimension <= 512");
  }
  return *matrix_;
}

ProjectionOperator projection(const GeometryContext& ctx,
                              const Eigen::MatrixXd& sketch) {
  return ProjectionOperator(ctx, sketch);
}

}  // namespace sgn
