#pragma once

#include <Eigen/Core>

#include <vector>

#include "manial/matrix_blocks.hpp"

namespace manial {

/// Convex nonsmooth penalty h acting on matrix blocks. Two kinds:
///  - scaled_l1(weight, rows, cols): h(v) = weight * sum |v_ij| on one block;
///    weight 0 is allowed and makes the term vanish (prox = identity)
///  - separable_sum(parts): blockwise sum, block i handled by part i
class NonsmoothTerm {
 public:
  static NonsmoothTerm scaled_l1(double weight, Eigen::Index rows, Eigen::Index cols);
  static NonsmoothTerm separable_sum(std::vector<NonsmoothTerm> parts);

  double value(const MatrixBlocks& v) const;

  /// prox_{mu h}(v) = argmin_y h(y) + ||y - v||^2 / (2 mu). Requires mu > 0.
  MatrixBlocks prox(const MatrixBlocks& v, double mu) const;

  /// Moreau envelope value M_h^mu(v) = min_y h(y) + ||y - v||^2 / (2 mu).
  double moreau_value(const MatrixBlocks& v, double mu) const;

  /// Envelope gradient (v - prox_{mu h}(v)) / mu. Norm bounded by the
  /// Lipschitz constant of h.
  MatrixBlocks moreau_grad(const MatrixBlocks& v, double mu) const;

  /// prox of the convex conjugate h* at unit parameter; equals
  /// v - prox(v, 1) by Moreau decomposition (entrywise clipping for l1).
  MatrixBlocks prox_conjugate(const MatrixBlocks& v) const;

  /// Entrywise sign subgradient: weight * sign(v), sign(0) = 0.
  MatrixBlocks sign_subgradient(const MatrixBlocks& v) const;

  /// Lipschitz constant of h in the Frobenius norm:
  /// weight * sqrt(rows * cols) for a scaled l1 block, root sum of squares
  /// across a separable sum.
  double lipschitz_const() const;

 private:
  NonsmoothTerm() = default;
  void require_shape(const MatrixBlocks& v) const;

  enum class Kind { kScaledL1, kSeparableSum };
  Kind kind_ = Kind::kScaledL1;
  double weight_ = 0.0;
  Eigen::Index rows_ = 0, cols_ = 0;
  std::vector<NonsmoothTerm> parts_;
};

}  // namespace manial
