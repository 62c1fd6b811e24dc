#include "manial/subsolvers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace manial {

namespace {

void require_stepsize_inputs(double L) {
  if (!(L > 0.0)) throw std::invalid_argument("inner solver: L must be positive");
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v))
    throw std::runtime_error(std::string("inner solver: non-finite ") + what);
}

}  // namespace

RgdResult rgd(const SmoothOracle& oracle, double L, long T, const ManifoldPoint& x0) {
  require_stepsize_inputs(L);
  if (T < 0) throw std::invalid_argument("rgd: T must be nonnegative");
  ManifoldPoint x = x0;
  TangentVector g = oracle.grad(x);
  RgdResult out{x};
  out.best_grad_norm = g.norm();
  require_finite(out.best_grad_norm, "gradient");
  const double v0 = oracle.value(x);
  require_finite(v0, "value");
  out.trace.push_back({v0, out.best_grad_norm});
  for (long t = 0; t < T; ++t) {
    x = retract(x, (-1.0 / L) * g);
    g = oracle.grad(x);
    const double gn = g.norm();
    require_finite(gn, "gradient");
    const double vt = oracle.value(x);
    require_finite(vt, "value");
    out.trace.push_back({vt, gn});
    ++out.steps;
    if (gn < out.best_grad_norm) {
      out.best_grad_norm = gn;
      out.x = x;
    }
  }
  return out;
}

RgdResult rgd_until(const SmoothOracle& oracle, double L, double eps, long cap,
                    const ManifoldPoint& x0) {
  require_stepsize_inputs(L);
  if (!(eps > 0.0)) throw std::invalid_argument("rgd_until: eps must be positive");
  if (cap <= 0) throw std::invalid_argument("rgd_until: cap must be positive");
  ManifoldPoint x = x0;
  TangentVector g = oracle.grad(x);
  RgdResult out{x};
  out.best_grad_norm = g.norm();
  require_finite(out.best_grad_norm, "gradient");
  const double v0 = oracle.value(x);
  require_finite(v0, "value");
  out.trace.push_back({v0, out.best_grad_norm});
  if (out.best_grad_norm <= eps) {
    out.converged = true;
    return out;
  }
  ManifoldPoint best = x;
  for (long t = 0; t < cap; ++t) {
    x = retract(x, (-1.0 / L) * g);
    g = oracle.grad(x);
    const double gn = g.norm();
    require_finite(gn, "gradient");
    const double vt = oracle.value(x);
    require_finite(vt, "value");
    out.trace.push_back({vt, gn});
    ++out.steps;
    if (gn < out.best_grad_norm) {
      out.best_grad_norm = gn;
      best = x;
    }
    if (gn <= eps) {
      out.x = x;
      out.best_grad_norm = gn;
      out.converged = true;
      return out;
    }
  }
  out.x = best;
  out.capped = true;
  return out;
}

RStormParams rstorm_params(double L, double G, double b) {
  if (!(L > 0.0) || !(G > 0.0) || !(b > 0.0))
    throw std::invalid_argument("rstorm_params: L, G, b must be positive");
  RStormParams p;
  p.L = L;
  p.kappa = b * std::cbrt(G * G) / L;
  p.c = 10.0 * L * L + G * G / (7.0 * L * p.kappa * p.kappa * p.kappa);
  const double w1 = std::pow(4.0 * L * p.kappa, 3);
  const double w2 = 2.0 * G * G;
  const double w3 = std::pow(p.c * p.kappa / (4.0 * L), 3);
  p.w = std::max({w1, w2, w3});
  return p;
}

RStormResult rstorm(const StochasticOracle& oracle, const RStormParams& params, long T,
                    const ManifoldPoint& x1, std::mt19937_64& rng, StormPairing pairing) {
  if (T <= 0) throw std::invalid_argument("rstorm: T must be positive");
  if (!(params.kappa > 0.0) || !(params.w > 0.0) || !(params.c > 0.0) || !(params.L > 0.0))
    throw std::invalid_argument("rstorm: invalid parameters");
  if (oracle.sample_count() <= 0) throw std::invalid_argument("rstorm: empty sample family");

  std::uniform_int_distribution<int> pick_sample(0, oracle.sample_count() - 1);
  const double eta_cap = 1.0 / (4.0 * params.L);

  ManifoldPoint x = x1;
  int sample = pick_sample(rng);
  TangentVector d = oracle.grad_sample(x, sample);
  double grad_sq_sum = d.dot(d);

  RStormResult out{x, x};
  out.best_momentum_norm = d.norm();
  require_finite(out.best_momentum_norm, "stochastic gradient");
  out.trace.push_back({0.0, 0.0, out.best_momentum_norm, out.best_momentum_norm});

  // Reservoir for the uniform output draw over x_1..x_T; rng consumption
  // stays fixed at one draw per iterate regardless of T.
  long seen = 1;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto maybe_keep = [&](const ManifoldPoint& cand) {
    ++seen;
    if (unit(rng) < 1.0 / static_cast<double>(seen)) out.x = cand;
  };

  for (long t = 1; t < T; ++t) {
    const double eta = params.kappa / std::cbrt(params.w + grad_sq_sum);
    if (eta > eta_cap * (1.0 + 1e-12))
      throw std::logic_error("rstorm: stepsize bound eta <= 1/(4L) violated");
    ManifoldPoint x_next = retract(x, -eta * d);
    const double a = params.c * eta * eta;
    if (!(a > 0.0) || a > 1.0 + 1e-12)
      throw std::logic_error("rstorm: momentum weight bound a in (0,1] violated");

    const int fresh = pick_sample(rng);
    TangentVector g_new = oracle.grad_sample(x_next, fresh);
    TangentVector g_old = (pairing == StormPairing::kPreviousSample)
                              ? oracle.grad_sample(x, sample)
                              : oracle.grad_sample(x, fresh);
    const double gn = g_new.norm();
    require_finite(gn, "stochastic gradient");
    grad_sq_sum += gn * gn;

    d = g_new + (1.0 - a) * transport(x_next, d - g_old);
    x = x_next;
    sample = fresh;
    ++out.steps;

    const double dn = d.norm();
    require_finite(dn, "momentum");
    out.trace.push_back({eta, a, gn, dn});
    if (dn < out.best_momentum_norm) {
      out.best_momentum_norm = dn;
      out.best = x;
    }
    maybe_keep(x);
  }
  return out;
}

}  // namespace manial
