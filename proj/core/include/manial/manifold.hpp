#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "manial/matrix_blocks.hpp"

namespace manial {

/// Feasibility tolerance enforced when constructing a ManifoldPoint.
inline constexpr double kFeasibilityTol = 1e-10;
/// Tangency tolerance enforced when constructing a TangentVector,
/// relative to max(1, ||v||).
inline constexpr double kTangencyTol = 1e-10;
/// Singular values below kRankTol * sigma_max are treated as zero when
/// orthonormalizing rank-deficient matrices.
inline constexpr double kRankTol = 1e-14;

/// Immutable description of a matrix manifold. Three kinds:
///  - Stiefel(n, r):            { X in R^{n x r} : X'X = I }
///  - GeneralizedStiefel(n, r, B): { X : X'BX = I } with B symmetric positive
///    definite; tangent geometry uses the inner product <u,v> = tr(u'Bv)
///  - Product: componentwise, values carry one block per component
class ManifoldDescriptor {
 public:
  enum class Kind { kStiefel, kGeneralizedStiefel, kProduct };

  static std::shared_ptr<const ManifoldDescriptor> stiefel(Eigen::Index n, Eigen::Index r);
  static std::shared_ptr<const ManifoldDescriptor> generalized_stiefel(Eigen::Index n,
                                                                       Eigen::Index r, Matrix B);
  static std::shared_ptr<const ManifoldDescriptor> product(
      std::vector<std::shared_ptr<const ManifoldDescriptor>> components);

  Kind kind() const { return kind_; }
  Eigen::Index rows() const { return n_; }
  Eigen::Index cols() const { return r_; }
  const Matrix& metric() const;
  const std::vector<std::shared_ptr<const ManifoldDescriptor>>& components() const;

  /// Smallest eigenvalue of the metric (1 for Stiefel, min over components
  /// for products). Bounds the gap between the metric and Frobenius norms.
  double metric_min_eigenvalue() const { return metric_min_eig_; }

  /// Total ambient dimension, summed over blocks.
  Eigen::Index ambient_size() const;

  bool shape_matches(const MatrixBlocks& v) const;

  double feasibility_error(const MatrixBlocks& x) const;
  double tangency_error(const MatrixBlocks& x, const MatrixBlocks& xi) const;

  MatrixBlocks project_tangent_value(const MatrixBlocks& x, const MatrixBlocks& u) const;
  MatrixBlocks retract_value(const MatrixBlocks& x, const MatrixBlocks& xi) const;
  /// Maps a Euclidean gradient into the tangent vector representing the
  /// derivative under the manifold metric (applies the metric inverse for
  /// generalized Stiefel components, then projects).
  MatrixBlocks gradient_value(const MatrixBlocks& x, const MatrixBlocks& egrad) const;
  /// Nearest feasible value (polar factor / metric orthonormalization).
  MatrixBlocks orthonormalize(const MatrixBlocks& v) const;
  MatrixBlocks random_value(std::mt19937_64& rng) const;

 private:
  ManifoldDescriptor() = default;

  Kind kind_ = Kind::kStiefel;
  Eigen::Index n_ = 0, r_ = 0;
  Matrix metric_;                     // generalized Stiefel only
  Eigen::LLT<Matrix> metric_llt_;     // factorization of the metric
  double metric_min_eig_ = 1.0;
  std::vector<std::shared_ptr<const ManifoldDescriptor>> components_;
};

/// Feasible point on a manifold. Construction validates feasibility within
/// kFeasibilityTol; a failing value is orthonormalized once and rejected if
/// still infeasible.
class ManifoldPoint {
 public:
  ManifoldPoint(std::shared_ptr<const ManifoldDescriptor> manifold, MatrixBlocks value);

  const std::shared_ptr<const ManifoldDescriptor>& manifold() const { return manifold_; }
  const MatrixBlocks& value() const { return value_; }

 private:
  std::shared_ptr<const ManifoldDescriptor> manifold_;
  MatrixBlocks value_;
};

/// Tangent vector at a base point. Construction validates the tangency
/// residual within kTangencyTol relative to max(1, ||value||).
class TangentVector {
 public:
  TangentVector(ManifoldPoint base, MatrixBlocks value);

  const ManifoldPoint& base() const { return base_; }
  const MatrixBlocks& value() const { return value_; }
  double norm() const { return value_.norm(); }
  double dot(const TangentVector& other) const { return value_.dot(other.value_); }

  TangentVector& operator+=(const TangentVector& other);
  TangentVector& operator-=(const TangentVector& other);
  TangentVector& operator*=(double s);

  friend TangentVector operator+(TangentVector a, const TangentVector& b) {
    a += b;
    return a;
  }
  friend TangentVector operator-(TangentVector a, const TangentVector& b) {
    a -= b;
    return a;
  }
  friend TangentVector operator*(double s, TangentVector a) {
    a *= s;
    return a;
  }

 private:
  ManifoldPoint base_;
  MatrixBlocks value_;
};

/// Projects an ambient value onto the tangent space at x.
TangentVector project_tangent(const ManifoldPoint& x, const MatrixBlocks& u);

/// Retraction. Stiefel uses the polar factor of x + xi; generalized Stiefel
/// metric-orthonormalizes x + xi. retract(x, 0) returns x exactly.
ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& xi);

/// Transports a tangent vector to the tangent space at y by projection.
TangentVector transport(const ManifoldPoint& y, const TangentVector& xi);

/// Gradient of a smooth function at x given its Euclidean gradient.
TangentVector riemannian_gradient(const ManifoldPoint& x, const MatrixBlocks& egrad);

/// Deterministic random feasible point: same seed, same point.
ManifoldPoint random_point(std::shared_ptr<const ManifoldDescriptor> manifold,
                           std::uint64_t seed);

double feasibility_error(const ManifoldPoint& x);

}  // namespace manial
