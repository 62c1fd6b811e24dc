#pragma once

#include <Eigen/Core>

#include <initializer_list>
#include <vector>

namespace manial {

using Matrix = Eigen::MatrixXd;

/// Value type shared by manifold points, tangent vectors and dual variables.
/// A plain matrix is a single block; product structures carry one block per
/// component. All arithmetic requires identical block shapes on both sides.
class MatrixBlocks {
 public:
  MatrixBlocks() = default;
  explicit MatrixBlocks(Matrix m);
  explicit MatrixBlocks(std::vector<Matrix> parts);
  MatrixBlocks(std::initializer_list<Matrix> parts);

  static MatrixBlocks zeros_like(const MatrixBlocks& other);

  std::size_t block_count() const { return parts_.size(); }
  Matrix& block(std::size_t i) { return parts_[i]; }
  const Matrix& block(std::size_t i) const { return parts_[i]; }

  /// Sole block of a non-product value. Throws if block_count() != 1.
  const Matrix& single() const;

  bool same_shape(const MatrixBlocks& other) const;

  double dot(const MatrixBlocks& other) const;
  double squared_norm() const;
  double norm() const;

  MatrixBlocks& operator+=(const MatrixBlocks& other);
  MatrixBlocks& operator-=(const MatrixBlocks& other);
  MatrixBlocks& operator*=(double s);

  friend MatrixBlocks operator+(MatrixBlocks a, const MatrixBlocks& b) {
    a += b;
    return a;
  }
  friend MatrixBlocks operator-(MatrixBlocks a, const MatrixBlocks& b) {
    a -= b;
    return a;
  }
  friend MatrixBlocks operator*(double s, MatrixBlocks a) {
    a *= s;
    return a;
  }
  friend MatrixBlocks operator*(MatrixBlocks a, double s) {
    a *= s;
    return a;
  }
  friend MatrixBlocks operator-(MatrixBlocks a) {
    a *= -1.0;
    return a;
  }

 private:
  std::vector<Matrix> parts_;
};

}  // namespace manial
