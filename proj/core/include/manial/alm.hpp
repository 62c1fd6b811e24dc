#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "manial/alf.hpp"
#include "manial/manifold.hpp"
#include "manial/subsolvers.hpp"
#include "manial/trace.hpp"

namespace manial {

/// Inner-solve budget policy of the outer loop.
///  kResidual:    solve subproblem k until its gradient norm is below
///                eps_k = 1/sigma_k (capped at inner_cap steps)
///  kFixedBudget: run exactly 2^(k+1) inner steps at outer step k, so K
///                outer steps consume 2^(K+1) - 2 inner iterations
enum class AlmOption { kResidual, kFixedBudget };

/// Dual stepsize rule variants (deterministic and stochastic outer loops
/// damp the multiplier update at different polynomial rates).
enum class DualRule { kDeterministic, kStochastic };

/// Penalty at outer step k (k starts at 0, sigma_0 = 1 for every schedule):
///  kResidual:                 sigma_k = b^k (requires b > 1)
///  kFixedBudget deterministic: sigma_k = 2^(k/3)
///  kFixedBudget stochastic:    sigma_k = 2^(2k/7)
double penalty_schedule(AlmOption option, bool stochastic, int k, double b);

/// y-update: prox_{h/sigma}(Ax - z/sigma).
MatrixBlocks update_y(const CompositeProblem& p, double sigma, const MatrixBlocks& z,
                      const MatrixBlocks& x);

/// Damped dual stepsize. r_ref is the reference residual fixed at
/// initialization, r_next the current one, k the outer index (0-based).
///  kDeterministic: beta0 * min(r_ref log^2(2) / (r_next (k+1)^2 log(k+2)), 1)
///  kStochastic:    beta0 * min(r_ref log^2(2) / (r_next (k+1) log^2(k+2)), 1)
/// A zero r_next clamps to beta0.
double dual_stepsize(DualRule rule, double beta0, double r_ref, double r_next, int k);

/// Multiplier update z - beta (Ax - y).
MatrixBlocks dual_update(const MatrixBlocks& z, double beta, const MatrixBlocks& residual);

/// Certified multiplier z - sigma (Ax - y); its negation is an exact
/// subgradient of h at the y-update output.
MatrixBlocks zbar(const MatrixBlocks& z, double sigma, const MatrixBlocks& residual);

/// Scaled stationarity measures at a primal/dual triple:
///  primal:          ||Ax - y|| / (1 + ||Ax|| + ||y||)
///  dual:            ||grad map of (f_egrad - A* z)|| / (1 + ||f_egrad||)
///  complementarity: ||z - prox_{h*}(z - Ax)|| / (1 + ||z||)
struct KktResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;
  double max() const;
};

KktResiduals kkt_residuals(const CompositeProblem& p, const ManifoldPoint& x,
                           const MatrixBlocks& y, const MatrixBlocks& z);

/// Per-outer-iteration snapshot passed to the test/diagnostic hook.
struct AlmIterate {
  int k = 0;
  ManifoldPoint x;
  MatrixBlocks y;
  MatrixBlocks z_prev;
  MatrixBlocks z;
  MatrixBlocks z_bar;
  double sigma = 0.0;
  double epsilon = 0.0;
  double beta = 0.0;
  double residual_norm = 0.0;       // ||Ax - y||
  double grad_psi_norm = 0.0;       // certified inner gradient norm
  double stationarity_norm = 0.0;   // ||grad map of (f_egrad - A* z_bar)||
  long inner_iters = 0;
  bool inner_capped = false;
  KktResiduals residuals;           // evaluated with z_bar
};

struct AlmConfig {
  AlmOption option = AlmOption::kResidual;
  double b = 2.0;
  double beta0 = 1.0;
  double tol = 1e-6;
  int max_outer = 60;
  long inner_cap = 1000000;
  std::uint64_t seed = 0;
  /// Stop on unscaled stationarity/feasibility norms instead of the scaled
  /// residuals.
  bool absolute_kkt = false;
  /// Tuning scalar feeding the stochastic inner solver's parameter map.
  double storm_b = 1.0;
  StormPairing storm_pairing = StormPairing::kPreviousSample;
  SmoothnessConfig smoothness{};
  /// Gradient bound override; estimated from random feasible points when
  /// unset. Estimation draws are not charged to the oracle counters.
  std::optional<double> gradient_bound;
  int gradient_bound_trials = 50;
  std::optional<ManifoldPoint> x0;
  std::function<void(const AlmIterate&)> on_iterate;
  bool collect_timing = true;
};

enum class AlmStatus { kConverged, kBudgetExhausted };

struct AlmResult {
  ManifoldPoint x;
  MatrixBlocks y;
  MatrixBlocks z;
  MatrixBlocks z_bar;
  AlmStatus status = AlmStatus::kBudgetExhausted;
  std::vector<TraceRecord> trace;
  long oracle_calls = 0;      // full-gradient (deterministic) or batch (stochastic)
  long prox_calls = 0;
  long retraction_calls = 0;
  double seconds = 0.0;
};

/// Deterministic outer loop: envelope-smoothed augmented Lagrangian
/// subproblems solved by rgd / rgd_until, damped multiplier updates,
/// stopping on the scaled residuals evaluated with the certified multiplier.
AlmResult manial(const CompositeProblem& p, const AlmConfig& cfg);

/// Stochastic outer loop: subproblems solved by the recursive-momentum
/// inner solver over the problem's finite-sum batches. Requires finite_sum.
AlmResult stomanial(const CompositeProblem& p, const AlmConfig& cfg);

}  // namespace manial
