#include "manial/matrix_blocks.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace manial {

MatrixBlocks::MatrixBlocks(Matrix m) { parts_.push_back(std::move(m)); }

MatrixBlocks::MatrixBlocks(std::vector<Matrix> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw std::invalid_argument("MatrixBlocks: empty block list");
}

MatrixBlocks::MatrixBlocks(std::initializer_list<Matrix> parts)
    : MatrixBlocks(std::vector<Matrix>(parts)) {}

MatrixBlocks MatrixBlocks::zeros_like(const MatrixBlocks& other) {
  MatrixBlocks out;
  out.parts_.reserve(other.parts_.size());
  for (const Matrix& p : other.parts_) out.parts_.push_back(Matrix::Zero(p.rows(), p.cols()));
  return out;
}

const Matrix& MatrixBlocks::single() const {
  if (parts_.size() != 1)
    throw std::logic_error("MatrixBlocks::single: value has " + std::to_string(parts_.size()) +
                           " blocks");
  return parts_[0];
}

bool MatrixBlocks::same_shape(const MatrixBlocks& other) const {
  if (parts_.size() != other.parts_.size()) return false;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i].rows() != other.parts_[i].rows() || parts_[i].cols() != other.parts_[i].cols())
      return false;
  }
  return true;
}

namespace {
void require_same_shape(const MatrixBlocks& a, const MatrixBlocks& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("MatrixBlocks: block shape mismatch");
}
}  // namespace

double MatrixBlocks::dot(const MatrixBlocks& other) const {
  require_same_shape(*this, other);
  double s = 0.0;
  for (std::size_t i = 0; i < parts_.size(); ++i)
    s += parts_[i].cwiseProduct(other.parts_[i]).sum();
  return s;
}

double MatrixBlocks::squared_norm() const {
  double s = 0.0;
  for (const Matrix& p : parts_) s += p.squaredNorm();
  return s;
}

double MatrixBlocks::norm() const { return std::sqrt(squared_norm()); }

MatrixBlocks& MatrixBlocks::operator+=(const MatrixBlocks& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < parts_.size(); ++i) parts_[i] += other.parts_[i];
  return *this;
}

MatrixBlocks& MatrixBlocks::operator-=(const MatrixBlocks& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < parts_.size(); ++i) parts_[i] -= other.parts_[i];
  return *this;
}

MatrixBlocks& MatrixBlocks::operator*=(double s) {
  for (Matrix& p : parts_) p *= s;
  return *this;
}

}  // namespace manial
