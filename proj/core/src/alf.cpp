#include "manial/alf.hpp"

#include <cmath>
#include <stdexcept>

namespace manial {

LinearMap LinearMap::identity() {
  LinearMap m;
  m.apply = [](const MatrixBlocks& v) { return v; };
  m.adjoint = [](const MatrixBlocks& v) { return v; };
  m.operator_norm = 1.0;
  return m;
}

namespace {

void require_sigma(double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("smoothed augmented Lagrangian: sigma must be positive");
}

void require_sigma_nonneg(double sigma) {
  if (!(sigma >= 0.0))
    throw std::domain_error("smoothness constant: sigma must be nonnegative");
}

/// Shifted argument w = Ax - z / sigma.
MatrixBlocks shifted_residual(const CompositeProblem& p, double sigma, const MatrixBlocks& z,
                              const MatrixBlocks& x) {
  MatrixBlocks w = p.map.apply(x);
  w -= (1.0 / sigma) * z;
  return w;
}

}  // namespace

double alf_value(const CompositeProblem& p, double sigma, const MatrixBlocks& z,
                 const ManifoldPoint& x) {
  require_sigma(sigma);
  const MatrixBlocks w = shifted_residual(p, sigma, z, x.value());
  return p.f_value(x.value()) + p.h.moreau_value(w, 1.0 / sigma) -
         z.squared_norm() / (2.0 * sigma);
}

MatrixBlocks alf_egrad(const CompositeProblem& p, double sigma, const MatrixBlocks& z,
                       const ManifoldPoint& x) {
  require_sigma(sigma);
  const MatrixBlocks w = shifted_residual(p, sigma, z, x.value());
  MatrixBlocks g = p.f_egrad(x.value());
  g += p.map.adjoint(p.h.moreau_grad(w, 1.0 / sigma));
  return g;
}

TangentVector alf_rgrad(const CompositeProblem& p, double sigma, const MatrixBlocks& z,
                        const ManifoldPoint& x) {
  return riemannian_gradient(x, alf_egrad(p, sigma, z, x));
}

MatrixBlocks alf_stoch_egrad(const CompositeProblem& p, double sigma, const MatrixBlocks& z,
                             const ManifoldPoint& x, int batch_index) {
  require_sigma(sigma);
  if (!p.finite_sum) throw std::invalid_argument("alf_stoch_egrad: problem has no finite sum");
  if (batch_index < 0 || batch_index >= p.finite_sum->batch_count)
    throw std::out_of_range("alf_stoch_egrad: batch index out of range");
  const MatrixBlocks w = shifted_residual(p, sigma, z, x.value());
  MatrixBlocks g = p.finite_sum->egrad(x.value(), batch_index);
  g += p.map.adjoint(p.h.moreau_grad(w, 1.0 / sigma));
  return g;
}

double smoothness_constant(const CompositeProblem& p, double sigma, const SmoothnessConfig& cfg) {
  require_sigma_nonneg(sigma);
  const double a2 = cfg.alpha * cfg.alpha;
  return a2 * (p.lip_f_grad + sigma * p.map.operator_norm * p.map.operator_norm) +
         2.0 * cfg.G * cfg.beta;
}

double transport_smoothness_constant(const CompositeProblem& p, double sigma,
                                     const SmoothnessConfig& cfg) {
  require_sigma_nonneg(sigma);
  return (cfg.alpha * cfg.Lp + cfg.zeta) * cfg.G + cfg.alpha * p.lip_f_grad +
         p.map.operator_norm * sigma;
}

double estimate_gradient_bound(const CompositeProblem& p, double sigma, int trials,
                               std::uint64_t seed, bool stochastic) {
  require_sigma(sigma);
  if (trials <= 0) throw std::invalid_argument("estimate_gradient_bound: trials must be positive");
  if (stochastic && !p.finite_sum)
    throw std::invalid_argument("estimate_gradient_bound: problem has no finite sum");
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    ManifoldPoint x(p.manifold, p.manifold->random_value(rng));
    MatrixBlocks z = MatrixBlocks::zeros_like(p.map.apply(x.value()));
    double g;
    if (stochastic) {
      std::uniform_int_distribution<int> pick(0, p.finite_sum->batch_count - 1);
      g = alf_stoch_egrad(p, sigma, z, x, pick(rng)).norm();
    } else {
      g = alf_egrad(p, sigma, z, x).norm();
    }
    worst = std::max(worst, g);
  }
  return 2.0 * worst;
}

}  // namespace manial
