#include "manial/nonsmooth.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace manial {

NonsmoothTerm NonsmoothTerm::scaled_l1(double weight, Eigen::Index rows, Eigen::Index cols) {
  if (weight < 0.0) throw std::invalid_argument("scaled_l1: weight must be nonnegative");
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("scaled_l1: empty shape");
  NonsmoothTerm t;
  t.kind_ = Kind::kScaledL1;
  t.weight_ = weight;
  t.rows_ = rows;
  t.cols_ = cols;
  return t;
}

NonsmoothTerm NonsmoothTerm::separable_sum(std::vector<NonsmoothTerm> parts) {
  if (parts.size() < 2) throw std::invalid_argument("separable_sum: need at least 2 parts");
  for (const NonsmoothTerm& p : parts) {
    if (p.kind_ == Kind::kSeparableSum)
      throw std::invalid_argument("separable_sum: nested sums are not supported");
  }
  NonsmoothTerm t;
  t.kind_ = Kind::kSeparableSum;
  t.parts_ = std::move(parts);
  return t;
}

void NonsmoothTerm::require_shape(const MatrixBlocks& v) const {
  if (kind_ == Kind::kSeparableSum) {
    if (v.block_count() != parts_.size())
      throw std::invalid_argument("NonsmoothTerm: expected one block per part");
    for (std::size_t i = 0; i < parts_.size(); ++i)
      parts_[i].require_shape(MatrixBlocks(v.block(i)));
    return;
  }
  if (v.block_count() != 1 || v.block(0).rows() != rows_ || v.block(0).cols() != cols_)
    throw std::invalid_argument("NonsmoothTerm: block shape mismatch");
}

double NonsmoothTerm::value(const MatrixBlocks& v) const {
  require_shape(v);
  if (kind_ == Kind::kSeparableSum) {
    double s = 0.0;
    for (std::size_t i = 0; i < parts_.size(); ++i) s += parts_[i].value(MatrixBlocks(v.block(i)));
    return s;
  }
  return weight_ * v.block(0).cwiseAbs().sum();
}

MatrixBlocks NonsmoothTerm::prox(const MatrixBlocks& v, double mu) const {
  if (!(mu > 0.0)) throw std::domain_error("prox: mu must be positive");
  require_shape(v);
  if (kind_ == Kind::kSeparableSum) {
    std::vector<Matrix> out;
    out.reserve(parts_.size());
    for (std::size_t i = 0; i < parts_.size(); ++i)
      out.push_back(parts_[i].prox(MatrixBlocks(v.block(i)), mu).block(0));
    return MatrixBlocks(std::move(out));
  }
  const double tau = mu * weight_;
  const Matrix& V = v.block(0);
  // soft threshold at tau
  return MatrixBlocks(Matrix(V.array().sign() * (V.array().abs() - tau).max(0.0)));
}

double NonsmoothTerm::moreau_value(const MatrixBlocks& v, double mu) const {
  if (!(mu > 0.0)) throw std::domain_error("moreau_value: mu must be positive");
  require_shape(v);
  if (kind_ == Kind::kSeparableSum) {
    double s = 0.0;
    for (std::size_t i = 0; i < parts_.size(); ++i)
      s += parts_[i].moreau_value(MatrixBlocks(v.block(i)), mu);
    return s;
  }
  // Huber sum: |t| <= mu w -> t^2/(2 mu), else w |t| - mu w^2 / 2.
  const double w = weight_;
  const double tau = mu * w;
  double s = 0.0;
  const Matrix& V = v.block(0);
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
      const double a = std::abs(V(i, j));
      s += (a <= tau) ? a * a / (2.0 * mu) : w * a - mu * w * w / 2.0;
    }
  }
  return s;
}

MatrixBlocks NonsmoothTerm::moreau_grad(const MatrixBlocks& v, double mu) const {
  if (!(mu > 0.0)) throw std::domain_error("moreau_grad: mu must be positive");
  MatrixBlocks p = prox(v, mu);
  MatrixBlocks g = v;
  g -= p;
  g *= 1.0 / mu;
  return g;
}

MatrixBlocks NonsmoothTerm::prox_conjugate(const MatrixBlocks& v) const {
  require_shape(v);
  if (kind_ == Kind::kSeparableSum) {
    std::vector<Matrix> out;
    out.reserve(parts_.size());
    for (std::size_t i = 0; i < parts_.size(); ++i)
      out.push_back(parts_[i].prox_conjugate(MatrixBlocks(v.block(i))).block(0));
    return MatrixBlocks(std::move(out));
  }
  const double w = weight_;
  return MatrixBlocks(Matrix(v.block(0).array().min(w).max(-w)));
}

MatrixBlocks NonsmoothTerm::sign_subgradient(const MatrixBlocks& v) const {
  require_shape(v);
  if (kind_ == Kind::kSeparableSum) {
    std::vector<Matrix> out;
    out.reserve(parts_.size());
    for (std::size_t i = 0; i < parts_.size(); ++i)
      out.push_back(parts_[i].sign_subgradient(MatrixBlocks(v.block(i))).block(0));
    return MatrixBlocks(std::move(out));
  }
  return MatrixBlocks(Matrix(weight_ * v.block(0).array().sign()));
}

double NonsmoothTerm::lipschitz_const() const {
  if (kind_ == Kind::kSeparableSum) {
    double s = 0.0;
    for (const NonsmoothTerm& p : parts_) {
      const double l = p.lipschitz_const();
      s += l * l;
    }
    return std::sqrt(s);
  }
  return weight_ * std::sqrt(static_cast<double>(rows_ * cols_));
}

}  // namespace manial
