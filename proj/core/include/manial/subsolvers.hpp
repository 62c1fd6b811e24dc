#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "manial/manifold.hpp"

namespace manial {

/// First-order oracle for a smooth function on a manifold. Gradient
/// evaluations are counted; value evaluations are not.
class SmoothOracle {
 public:
  SmoothOracle(std::function<double(const ManifoldPoint&)> value,
               std::function<TangentVector(const ManifoldPoint&)> grad)
      : value_(std::move(value)),
        grad_(std::move(grad)),
        calls_(std::make_shared<long>(0)) {}

  double value(const ManifoldPoint& x) const { return value_(x); }
  TangentVector grad(const ManifoldPoint& x) const {
    ++*calls_;
    return grad_(x);
  }
  long gradient_calls() const { return *calls_; }

 private:
  std::function<double(const ManifoldPoint&)> value_;
  std::function<TangentVector(const ManifoldPoint&)> grad_;
  std::shared_ptr<long> calls_;
};

struct InnerStep {
  double value = 0.0;
  double grad_norm = 0.0;
};

struct RgdResult {
  ManifoldPoint x;              // iterate with the smallest observed gradient norm
  double best_grad_norm = 0.0;
  long steps = 0;               // retractions taken
  bool converged = false;       // rgd_until only
  bool capped = false;          // rgd_until only
  std::vector<InnerStep> trace;
};

/// Gradient descent with retractions and constant stepsize 1/L for exactly T
/// steps (T+1 gradient evaluations). Returns the iterate among x_0..x_T with
/// the smallest observed gradient norm.
RgdResult rgd(const SmoothOracle& oracle, double L, long T, const ManifoldPoint& x0);

/// Same iteration, run until ||grad|| <= eps or `cap` steps. Returns the
/// first iterate meeting the tolerance (zero steps if x0 already does);
/// when capped, returns the best iterate seen and sets the flag.
RgdResult rgd_until(const SmoothOracle& oracle, double L, double eps, long cap,
                    const ManifoldPoint& x0);

/// Stepsize and momentum parameters of the recursive-momentum solver,
/// derived from the smoothness bound L, gradient bound G and a tuning
/// scalar b:
///   kappa = b G^{2/3} / L
///   c     = 10 L^2 + G^2 / (7 L kappa^3)
///   w     = max{ (4 L kappa)^3, 2 G^2, (c kappa / (4L))^3 }
struct RStormParams {
  double kappa = 0.0;
  double c = 0.0;
  double w = 0.0;
  double L = 0.0;
};

RStormParams rstorm_params(double L, double G, double b);

/// Stochastic first-order oracle over a finite family of samples. The same
/// sample id evaluated twice at the same point is bit-identical; the same
/// sample id may be evaluated at different points.
class StochasticOracle {
 public:
  StochasticOracle(std::function<TangentVector(const ManifoldPoint&, int)> grad_sample,
                   int sample_count)
      : grad_sample_(std::move(grad_sample)),
        sample_count_(sample_count),
        calls_(std::make_shared<long>(0)) {}

  TangentVector grad_sample(const ManifoldPoint& x, int sample) const {
    ++*calls_;
    return grad_sample_(x, sample);
  }
  int sample_count() const { return sample_count_; }
  long gradient_calls() const { return *calls_; }

 private:
  std::function<TangentVector(const ManifoldPoint&, int)> grad_sample_;
  int sample_count_ = 0;
  std::shared_ptr<long> calls_;
};

/// Which two gradient evaluations feed the momentum correction at step t:
///  - kPreviousSample: d_{t+1} = g(x_{t+1}, s_{t+1}) +
///      (1 - a) T(d_t - g(x_t, s_t))  (independent samples)
///  - kCurrentSample:  the fresh sample is evaluated at both points,
///      correction uses g(x_t, s_{t+1})
enum class StormPairing { kPreviousSample, kCurrentSample };

struct RStormStep {
  double eta = 0.0;
  double a = 0.0;
  double grad_sample_norm = 0.0;
  double momentum_norm = 0.0;
};

struct RStormResult {
  ManifoldPoint x;            // drawn uniformly from x_1..x_T
  ManifoldPoint best;         // smallest momentum norm, diagnostics only
  double best_momentum_norm = 0.0;
  long steps = 0;             // retractions taken (T - 1)
  std::vector<RStormStep> trace;
};

/// Recursive-momentum stochastic descent for T iterations: adaptive steps
/// eta_t = kappa / (w + sum_{i<=t} ||g_i||^2)^{1/3}, momentum weight
/// a_{t+1} = c eta_t^2, transported momentum correction. Consumes exactly
/// 2T - 1 stochastic gradient evaluations. eta_t <= 1/(4L) and
/// a_{t+1} in (0, 1] are asserted at every step.
RStormResult rstorm(const StochasticOracle& oracle, const RStormParams& params, long T,
                    const ManifoldPoint& x1, std::mt19937_64& rng,
                    StormPairing pairing = StormPairing::kPreviousSample);

}  // namespace manial
