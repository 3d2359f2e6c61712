#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <optional>
#include <stdexcept>

namespace sgn {

// Thrown when a vector that must lie in the column space of a symmetric
// matrix has a component outside it (beyond the rank tolerance). Dual norms
// and sketched Newton steps require the gradient inside the Hessian range.
class RangeViolation : public std::runtime_error {
 public:
  explicit RangeViolation(const std::string& what) : std::runtime_error(what) {}
};

// Moore-Penrose pseudoinverse of a symmetric PSD matrix via eigendecomposition.
// Eigenvalues below rel_tol * lambda_max are treated as zero.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double rel_tol = 1e-10);

// Hessian at a point together with its cached symmetric eigendecomposition.
// Supplies the local norm, the dual norm and range tests. Immutable after
// construction; safe for concurrent reads.
class GeometryContext {
 public:
  explicit GeometryContext(const Eigen::MatrixXd& hessian,
                           double rank_tolerance = 1e-10);

  int dimension() const { return static_cast<int>(hessian_.rows()); }
  const Eigen::MatrixXd& hessian() const { return hessian_; }
  double rank_tolerance() const { return rank_tolerance_; }

  int rank() const { return rank_; }
  bool positive_definite() const { return rank_ == dimension(); }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }

  // H^dagger v through the cached factorization.
  Eigen::VectorXd apply_pseudo_inverse(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd pseudo_inverse_matrix() const;
  // H^{-1/2}; requires a positive definite matrix.
  Eigen::MatrixXd inverse_sqrt() const;

 private:
  Eigen::MatrixXd hessian_;  // symmetrized input
  double rank_tolerance_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  double cutoff_ = 0.0;  // absolute eigenvalue cutoff
  int rank_ = 0;
};

// <H v, v>^{1/2}; zero exactly when v is in the null space of H.
double local_norm(const GeometryContext& ctx, const Eigen::VectorXd& v);

// <g, H^dagger g>^{1/2}. Requires g in Range(H); throws RangeViolation
// otherwise, since the dual norm of an out-of-range vector is not defined.
double dual_norm(const GeometryContext& ctx, const Eigen::VectorXd& g);

// true iff the component of g outside Range(H) is at most
// rank_tolerance * ||g||; true for g = 0.
bool range_check(const GeometryContext& ctx, const Eigen::VectorXd& g);

// Projection onto Range(S) orthogonal in the <H.,.> inner product:
// P = S (S^T H S)^dagger S^T H. Kept in factored form; the dense d x d
// realization is materialized only for d <= kDenseLimit (validation paths).
class ProjectionOperator {
 public:
  static constexpr int kDenseLimit = 512;

  ProjectionOperator(const GeometryContext& geometry, Eigen::MatrixXd sketch);

  const Eigen::MatrixXd& sketch() const { return sketch_; }
  const GeometryContext& geometry() const { return *geometry_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& h) const;            // P h
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& g) const;  // P^T g

  bool has_matrix() const { return matrix_.has_value(); }
  const Eigen::MatrixXd& matrix() const;

 private:
  const GeometryContext* geometry_;  // must outlive the operator
  Eigen::MatrixXd sketch_;
  Eigen::MatrixXd core_;  // (S^T H S)^dagger
  bool identity_shortcut_ = false;
  std::optional<Eigen::MatrixXd> matrix_;
};

ProjectionOperator projection(const GeometryContext& ctx,
                              const Eigen::MatrixXd& sketch);

}  // namespace sgn
