#include <benchmark/benchmark.h>

#include <random>

#include "manial/matrix_blocks.hpp"
#include "manial/nonsmooth.hpp"

namespace {

using namespace manial;

MatrixBlocks gaussian_block(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return MatrixBlocks(std::move(m));
}

void BM_Prox(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::Index r = state.range(1);
  const NonsmoothTerm h = NonsmoothTerm::scaled_l1(0.5, n, r);
  const MatrixBlocks v = gaussian_block(n, r, 1);
  for (auto _ : state) {
    MatrixBlocks p = h.prox(v, 0.1);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_Prox)->Args({100, 5})->Args({1000, 10});

void BM_MoreauValue(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::Index r = state.range(1);
  const NonsmoothTerm h = NonsmoothTerm::scaled_l1(0.5, n, r);
  const MatrixBlocks v = gaussian_block(n, r, 1);
  for (auto _ : state) {
    double m = h.moreau_value(v, 0.1);
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(BM_MoreauValue)->Args({100, 5})->Args({1000, 10});

void BM_MoreauGrad(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::Index r = state.range(1);
  const NonsmoothTerm h = NonsmoothTerm::scaled_l1(0.5, n, r);
  const MatrixBlocks v = gaussian_block(n, r, 1);
  for (auto _ : state) {
    MatrixBlocks g = h.moreau_grad(v, 0.1);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_MoreauGrad)->Args({100, 5})->Args({1000, 10});

void BM_ProxConjugate(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::Index r = state.range(1);
  const NonsmoothTerm h = NonsmoothTerm::scaled_l1(0.5, n, r);
  const MatrixBlocks v = gaussian_block(n, r, 1);
  for (auto _ : state) {
    MatrixBlocks p = h.prox_conjugate(v);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_ProxConjugate)->Args({100, 5})->Args({1000, 10});

}  // namespace

BENCHMARK_MAIN();
