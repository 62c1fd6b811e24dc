#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

#include "manial/alf.hpp"
#include "manial/alm.hpp"
#include "manial/problems.hpp"
#include "manial/subsolvers.hpp"

namespace {

using namespace manial;

const CompositeProblem& spca_instance() {
  static const CompositeProblem p = build_spca(gen_spca_data(500, 100, 7), 0.5, 5);
  return p;
}

void BM_AlfGradient(benchmark::State& state) {
  const CompositeProblem& p = spca_instance();
  ManifoldPoint x = random_point(p.manifold, 1);
  const MatrixBlocks z = MatrixBlocks::zeros_like(p.map.apply(x.value()));
  for (auto _ : state) {
    TangentVector g = alf_rgrad(p, 10.0, z, x);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_AlfGradient);

void BM_AlfBatchGradient(benchmark::State& state) {
  const CompositeProblem& p = spca_instance();
  ManifoldPoint x = random_point(p.manifold, 1);
  const MatrixBlocks z = MatrixBlocks::zeros_like(p.map.apply(x.value()));
  int batch = 0;
  for (auto _ : state) {
    MatrixBlocks g = alf_stoch_egrad(p, 10.0, z, x, batch);
    batch = (batch + 1) % p.finite_sum->batch_count;
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_AlfBatchGradient);

void BM_RgdSteps(benchmark::State& state) {
  const CompositeProblem& p = spca_instance();
  const double sigma = 10.0;
  ManifoldPoint x0 = random_point(p.manifold, 1);
  const MatrixBlocks z = MatrixBlocks::zeros_like(p.map.apply(x0.value()));
  SmoothOracle oracle([&](const ManifoldPoint& x) { return alf_value(p, sigma, z, x); },
                      [&](const ManifoldPoint& x) { return alf_rgrad(p, sigma, z, x); });
  SmoothnessConfig smoothness;
  const double L = smoothness_constant(p, sigma, smoothness);
  const long steps = state.range(0);
  for (auto _ : state) {
    RgdResult res = rgd(oracle, L, steps, x0);
    benchmark::DoNotOptimize(res);
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_RgdSteps)->Arg(16)->Arg(64);

void BM_RstormSteps(benchmark::State& state) {
  const CompositeProblem& p = spca_instance();
  const double sigma = 10.0;
  ManifoldPoint x0 = random_point(p.manifold, 1);
  const MatrixBlocks z = MatrixBlocks::zeros_like(p.map.apply(x0.value()));
  StochasticOracle oracle(
      [&](const ManifoldPoint& x, int batch) {
        return riemannian_gradient(x, alf_stoch_egrad(p, sigma, z, x, batch));
      },
      p.finite_sum->batch_count);
  SmoothnessConfig smoothness;
  smoothness.G = estimate_gradient_bound(p, sigma, 10, 3, true);
  const double L = std::max(smoothness_constant(p, sigma, smoothness),
                            transport_smoothness_constant(p, sigma, smoothness));
  const RStormParams params = rstorm_params(L, smoothness.G, 1.0);
  const long steps = state.range(0);
  std::mt19937_64 rng(5);
  for (auto _ : state) {
    RStormResult res = rstorm(oracle, params, steps, x0, rng);
    benchmark::DoNotOptimize(res);
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_RstormSteps)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
