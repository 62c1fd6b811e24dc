#include "manial/alm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace manial {

double penalty_schedule(AlmOption option, bool stochastic, int k, double b) {
  if (k < 0) throw std::invalid_argument("penalty_schedule: k must be nonnegative");
  if (option == AlmOption::kResidual) {
    if (!(b > 1.0)) throw std::invalid_argument("penalty_schedule: b must exceed 1");
    return std::pow(b, k);
  }
  return stochastic ? std::pow(2.0, 2.0 * k / 7.0) : std::pow(2.0, k / 3.0);
}

MatrixBlocks update_y(const CompositeProblem& p, double sigma, const MatrixBlocks& z,
                      const MatrixBlocks& x) {
  if (!(sigma > 0.0)) throw std::domain_error("update_y: sigma must be positive");
  MatrixBlocks w = p.map.apply(x);
  w -= (1.0 / sigma) * z;
  return p.h.prox(w, 1.0 / sigma);
}

double dual_stepsize(DualRule rule, double beta0, double r_ref, double r_next, int k) {
  if (!(beta0 > 0.0)) throw std::invalid_argument("dual_stepsize: beta0 must be positive");
  if (k < 0) throw std::invalid_argument("dual_stepsize: k must be nonnegative");
  if (r_ref < 0.0 || r_next < 0.0)
    throw std::invalid_argument("dual_stepsize: residuals must be nonnegative");
  if (r_next == 0.0) return beta0;
  const double log2 = std::log(2.0);
  const double kp1 = static_cast<double>(k + 1);
  const double damp = (rule == DualRule::kDeterministic)
                          ? kp1 * kp1 * std::log(static_cast<double>(k + 2))
                          : kp1 * std::pow(std::log(static_cast<double>(k + 2)), 2);
  const double ratio = r_ref * log2 * log2 / (r_next * damp);
  return beta0 * std::min(ratio, 1.0);
}

MatrixBlocks dual_update(const MatrixBlocks& z, double beta, const MatrixBlocks& residual) {
  MatrixBlocks out = z;
  out -= beta * residual;
  return out;
}

MatrixBlocks zbar(const MatrixBlocks& z, double sigma, const MatrixBlocks& residual) {
  MatrixBlocks out = z;
  out -= sigma * residual;
  return out;
}

double KktResiduals::max() const { return std::max({primal, dual, complementarity}); }

KktResiduals kkt_residuals(const CompositeProblem& p, const ManifoldPoint& x,
                           const MatrixBlocks& y, const MatrixBlocks& z) {
  KktResiduals out;
  const MatrixBlocks ax = p.map.apply(x.value());
  out.primal = (ax - y).norm() / (1.0 + ax.norm() + y.norm());
  const MatrixBlocks fg = p.f_egrad(x.value());
  out.dual = riemannian_gradient(x, fg - p.map.adjoint(z)).norm() / (1.0 + fg.norm());
  out.complementarity = (z - p.h.prox_conjugate(z - ax)).norm() / (1.0 + z.norm());
  return out;
}

namespace {

struct Tally {
  long primary = 0;  // batch-gradient evaluations (stochastic runs)
  long fgrad = 0;    // full-gradient evaluations
  long prox = 0;
  long retractions = 0;
};

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const std::string& f : flags) {
    if (!out.empty()) out += ';';
    out += f;
  }
  return out;
}

long fixed_budget_steps(int k) {
  if (k + 1 >= 62) throw std::runtime_error("fixed-budget inner steps overflow");
  return 1L << (k + 1);
}

struct OuterLoopContext {
  CompositeProblem counted;  // gradient oracles rerouted through the tally
  std::shared_ptr<Tally> tally;
  std::shared_ptr<double> observed_egrad_max;
  double metric_floor = 1.0;  // min(1, smallest metric eigenvalue)
};

OuterLoopContext make_context(const CompositeProblem& p, bool stochastic) {
  if (!p.manifold) throw std::invalid_argument("outer loop: problem has no manifold");
  if (!p.f_value || !p.f_egrad) throw std::invalid_argument("outer loop: missing smooth oracle");
  if (!p.map.apply || !p.map.adjoint) throw std::invalid_argument("outer loop: missing linear map");
  if (stochastic && !p.finite_sum)
    throw std::invalid_argument("stochastic outer loop: problem has no finite sum");
  OuterLoopContext ctx;
  ctx.tally = std::make_shared<Tally>();
  ctx.observed_egrad_max = std::make_shared<double>(0.0);
  ctx.counted = p;
  auto tally = ctx.tally;
  auto base_fgrad = p.f_egrad;
  ctx.counted.f_egrad = [tally, base_fgrad](const MatrixBlocks& x) {
    ++tally->fgrad;
    return base_fgrad(x);
  };
  if (p.finite_sum) {
    FiniteSum fs = *p.finite_sum;
    auto base_batch = fs.egrad;
    fs.egrad = [tally, base_batch](const MatrixBlocks& x, int b) {
      ++tally->primary;
      return base_batch(x, b);
    };
    ctx.counted.finite_sum = fs;
  }
  ctx.metric_floor = std::min(1.0, p.manifold->metric_min_eigenvalue());
  return ctx;
}

struct InnerOutcome {
  ManifoldPoint x;
  double grad_norm = 0.0;  // certified gradient (or momentum surrogate) norm
  long iters = 0;
  bool capped = false;
  bool surrogate = false;
};

using InnerSolver = std::function<InnerOutcome(int k, double sigma, double eps,
                                               const SmoothnessConfig& smooth,
                                               const MatrixBlocks& z, const ManifoldPoint& x)>;

AlmResult run_outer(const CompositeProblem& raw, const AlmConfig& cfg, bool stochastic,
                    OuterLoopContext& ctx, const InnerSolver& inner) {
  if (cfg.max_outer <= 0) throw std::invalid_argument("outer loop: max_outer must be positive");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("outer loop: tol must be positive");
  const CompositeProblem& p = ctx.counted;

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  if (cfg.x0 && cfg.x0->manifold() != p.manifold)
    throw std::invalid_argument("outer loop: x0 lives on a different manifold");
  ManifoldPoint x = cfg.x0 ? *cfg.x0 : random_point(p.manifold, cfg.seed);

  SmoothnessConfig smooth = cfg.smoothness;
  const double sigma0 = penalty_schedule(cfg.option, stochastic, 0, cfg.b);
  smooth.G = cfg.gradient_bound
                 ? *cfg.gradient_bound
                 : estimate_gradient_bound(raw, sigma0, cfg.gradient_bound_trials,
                                           cfg.seed ^ 0x5851f42d4c957f2dULL, stochastic);

  MatrixBlocks z = MatrixBlocks::zeros_like(p.map.apply(x.value()));
  // Reference residual for the dual stepsize rule: distance between Ax0 and
  // the y-update applied at the initial point. A literal y0 = Ax0 reference
  // is identically zero and would freeze the multiplier sequence.
  MatrixBlocks y = update_y(p, sigma0, z, x.value());
  ++ctx.tally->prox;
  double r_ref = (p.map.apply(x.value()) - y).norm();
  const DualRule rule = stochastic ? DualRule::kStochastic : DualRule::kDeterministic;

  AlmResult out{x, y, z, z};
  out.status = AlmStatus::kBudgetExhausted;

  for (int k = 0; k < cfg.max_outer; ++k) {
    const double sigma = penalty_schedule(cfg.option, stochastic, k, cfg.b);
    const double eps = 1.0 / sigma;

    *ctx.observed_egrad_max = 0.0;
    InnerOutcome step = inner(k, sigma, eps, smooth, z, x);
    x = step.x;

    std::vector<std::string> flags;
    if (step.capped) flags.push_back("cap");
    if (step.surrogate) flags.push_back("surrogate");
    if (*ctx.observed_egrad_max > smooth.G) {
      smooth.G = 2.0 * *ctx.observed_egrad_max;
      flags.push_back("G");
    }

    y = update_y(p, sigma, z, x.value());
    ++ctx.tally->prox;
    const MatrixBlocks ax = p.map.apply(x.value());
    const MatrixBlocks residual = ax - y;
    const double r = residual.norm();
    if (k == 0 && stochastic) r_ref = r;  // stochastic rule references the first outer residual

    const MatrixBlocks z_cert = zbar(z, sigma, residual);
    const double beta =
        (k == 0 && stochastic) ? cfg.beta0 : dual_stepsize(rule, cfg.beta0, r_ref, r, k);
    const MatrixBlocks z_next = dual_update(z, beta, residual);

    const MatrixBlocks fg = p.f_egrad(x.value());
    const double stationarity = riemannian_gradient(x, fg - p.map.adjoint(z_cert)).norm();
    KktResiduals res = kkt_residuals(p, x, y, z_cert);
    ++ctx.tally->prox;  // conjugate prox inside the residuals

    TraceRecord row;
    row.k = k;
    row.oracle_calls = stochastic ? ctx.tally->primary : ctx.tally->fgrad;
    row.wall_seconds = cfg.collect_timing ? elapsed() : 0.0;
    row.objective = p.objective(x.value());
    row.eta_p = res.primal;
    row.eta_d = res.dual;
    row.eta_c = res.complementarity;
    row.sigma = sigma;
    row.beta = beta;
    row.z_norm = z_next.norm();
    row.inner_iters = step.iters;
    row.flags = join_flags(flags);
    row.prox_calls = ctx.tally->prox;
    row.retraction_calls = ctx.tally->retractions;
    out.trace.push_back(row);

    if (cfg.on_iterate) {
      AlmIterate it{k,     x,   y,    z,    z_next,         z_cert,
                    sigma, eps, beta, r,    step.grad_norm, stationarity,
                    step.iters,  step.capped, res};
      cfg.on_iterate(it);
    }

    z = z_next;
    out.x = x;
    out.y = y;
    out.z = z;
    out.z_bar = z_cert;

    const bool converged =
        cfg.absolute_kkt ? std::max(stationarity, r) <= cfg.tol : res.max() <= cfg.tol;
    if (converged) {
      out.status = AlmStatus::kConverged;
      break;
    }
  }

  out.oracle_calls = stochastic ? ctx.tally->primary : ctx.tally->fgrad;
  out.prox_calls = ctx.tally->prox;
  out.retraction_calls = ctx.tally->retractions;
  out.seconds = elapsed();
  return out;
}

}  // namespace

AlmResult manial(const CompositeProblem& p, const AlmConfig& cfg) {
  OuterLoopContext ctx = make_context(p, false);
  auto tally = ctx.tally;
  auto egrad_max = ctx.observed_egrad_max;

  auto inner = [&](int k, double sigma, double eps, const SmoothnessConfig& smooth,
                   const MatrixBlocks& z, const ManifoldPoint& x) -> InnerOutcome {
    const CompositeProblem& cp = ctx.counted;
    const double L = smoothness_constant(cp, sigma, smooth) / ctx.metric_floor;
    SmoothOracle oracle(
        [&cp, sigma, &z](const ManifoldPoint& pt) { return alf_value(cp, sigma, z, pt); },
        [&cp, sigma, &z, tally, egrad_max](const ManifoldPoint& pt) {
          MatrixBlocks g = alf_egrad(cp, sigma, z, pt);
          ++tally->prox;
          *egrad_max = std::max(*egrad_max, g.norm());
          return riemannian_gradient(pt, g);
        });
    RgdResult r = (cfg.option == AlmOption::kResidual)
                      ? rgd_until(oracle, L, eps, cfg.inner_cap, x)
                      : rgd(oracle, L, fixed_budget_steps(k), x);
    tally->retractions += r.steps;
    return {r.x, r.best_grad_norm, r.steps, r.capped, false};
  };

  return run_outer(p, cfg, false, ctx, inner);
}

AlmResult stomanial(const CompositeProblem& p, const AlmConfig& cfg) {
  OuterLoopContext ctx = make_context(p, true);
  auto tally = ctx.tally;
  auto egrad_max = ctx.observed_egrad_max;
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  auto inner = [&](int k, double sigma, double eps, const SmoothnessConfig& smooth,
                   const MatrixBlocks& z, const ManifoldPoint& x) -> InnerOutcome {
    const CompositeProblem& cp = ctx.counted;
    const double L =
        std::max(smoothness_constant(cp, sigma, smooth),
                 transport_smoothness_constant(cp, sigma, smooth)) /
        ctx.metric_floor;
    StochasticOracle oracle(
        [&cp, sigma, &z, tally, egrad_max](const ManifoldPoint& pt, int sample) {
          MatrixBlocks g = alf_stoch_egrad(cp, sigma, z, pt, sample);
          ++tally->prox;
          *egrad_max = std::max(*egrad_max, g.norm());
          return riemannian_gradient(pt, g);
        },
        cp.finite_sum->batch_count);
    RStormParams params = rstorm_params(L, smooth.G, cfg.storm_b);

    if (cfg.option == AlmOption::kFixedBudget) {
      RStormResult r = rstorm(oracle, params, fixed_budget_steps(k), x, rng, cfg.storm_pairing);
      tally->retractions += r.steps;
      // The outer loop consumes the smallest-momentum iterate, mirroring the
      // deterministic loop's smallest-gradient handoff; the uniform draw
      // stays available as r.x for the in-expectation guarantee.
      return {r.best, r.best_momentum_norm, r.steps, false, false};
    }
    // Residual option: per-sample gradients do not certify the full gradient,
    // so a momentum-norm surrogate gates eps and rows carry a flag.
    long budget = 0;
    long block = 64;
    ManifoldPoint cur = x;
    double best = 0.0;
    bool capped = false;
    while (true) {
      RStormResult r = rstorm(oracle, params, block, cur, rng, cfg.storm_pairing);
      tally->retractions += r.steps;
      budget += block;
      cur = r.best;
      best = r.best_momentum_norm;
      if (best <= eps) break;
      if (budget >= cfg.inner_cap) {
        capped = true;
        break;
      }
      block = std::min(block * 2, cfg.inner_cap - budget);
    }
    return {cur, best, budget, capped, true};
  };

  return run_outer(p, cfg, true, ctx, inner);
}

}  // namespace manial
