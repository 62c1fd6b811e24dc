#pragma once

#include <functional>
#include <optional>

#include "manial/manifold.hpp"
#include "manial/matrix_blocks.hpp"
#include "manial/nonsmooth.hpp"

namespace manial {

/// Linear map between block spaces with a known operator norm.
struct LinearMap {
  std::function<MatrixBlocks(const MatrixBlocks&)> apply;
  std::function<MatrixBlocks(const MatrixBlocks&)> adjoint;
  double operator_norm = 1.0;

  static LinearMap identity();
};

/// Optional finite-sum structure of the smooth term: f = (1/N) sum_i f_i
/// with N = batch_count and batch oracles evaluating N-weighted components
/// so that the uniform average of batch gradients equals the full gradient.
struct FiniteSum {
  int batch_count = 0;
  std::function<double(const MatrixBlocks&, int)> value;
  std::function<MatrixBlocks(const MatrixBlocks&, int)> egrad;
};

/// Composite problem: minimize f(x) + h(A x) over x on a matrix manifold.
struct CompositeProblem {
  std::shared_ptr<const ManifoldDescriptor> manifold;
  std::function<double(const MatrixBlocks&)> f_value;
  std::function<MatrixBlocks(const MatrixBlocks&)> f_egrad;
  LinearMap map;  // A
  NonsmoothTerm h = NonsmoothTerm::scaled_l1(0.0, 1, 1);
  /// Lipschitz constant of the Euclidean gradient of f.
  double lip_f_grad = 0.0;
  std::optional<FiniteSum> finite_sum;

  /// Composite objective f(x) + h(Ax).
  double objective(const MatrixBlocks& x) const { return f_value(x) + h.value(map.apply(x)); }
};

/// Geometry constants used to assemble smoothness bounds.
///  alpha: ||R_x(u) - x|| <= alpha ||u||
///  beta:  ||R_x(u) - x - u|| <= beta ||u||^2
///  G:     bound on the Euclidean gradient norm of the smoothed objective
///  Lp, zeta: transport regularity constants, only used for the stochastic
///  inner solver's smoothness bound
struct SmoothnessConfig {
  double alpha = 1.0;
  double beta = 1.0;
  double G = 1.0;
  double Lp = 1.0;
  double zeta = 1.0;
};

/// Smoothed augmented Lagrangian value at penalty sigma and multiplier z:
/// f(x) + M_h^{1/sigma}(Ax - z/sigma) - ||z||^2 / (2 sigma).
double alf_value(const CompositeProblem& p, double sigma, const MatrixBlocks& z,
                 const ManifoldPoint& x);

/// Euclidean gradient of the smoothed augmented Lagrangian:
/// grad f(x) + sigma A*(Ax - z/sigma - prox_{h/sigma}(Ax - z/sigma)).
MatrixBlocks alf_egrad(const CompositeProblem& p, double sigma, const MatrixBlocks& z,
                       const ManifoldPoint& x);

/// Manifold gradient of the smoothed augmented Lagrangian.
TangentVector alf_rgrad(const CompositeProblem& p, double sigma, const MatrixBlocks& z,
                        const ManifoldPoint& x);

/// Batch variant of alf_egrad: the smooth part uses the finite-sum batch
/// gradient, the penalty part is exact.
MatrixBlocks alf_stoch_egrad(const CompositeProblem& p, double sigma, const MatrixBlocks& z,
                             const ManifoldPoint& x, int batch_index);

/// Retraction smoothness bound of the smoothed augmented Lagrangian:
/// alpha^2 (lip_f_grad + sigma ||A||^2) + 2 G beta.
double smoothness_constant(const CompositeProblem& p, double sigma, const SmoothnessConfig& cfg);

/// Transport regularity bound used by the stochastic inner solver:
/// (alpha Lp + zeta) G + alpha lip_f_grad + ||A|| sigma.
double transport_smoothness_constant(const CompositeProblem& p, double sigma,
                                     const SmoothnessConfig& cfg);

/// Gradient-norm bound estimate: twice the largest ||alf_egrad|| (or batch
/// gradient when stochastic) over `trials` random feasible points at the
/// given penalty with z = 0.
double estimate_gradient_bound(const CompositeProblem& p, double sigma, int trials,
                               std::uint64_t seed, bool stochastic = false);

}  // namespace manial
