#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>

#include "manial/manifold.hpp"
#include "manial/matrix_blocks.hpp"

namespace {

using namespace manial;

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

void BM_StiefelProject(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::Index r = state.range(1);
  auto m = ManifoldDescriptor::stiefel(n, r);
  ManifoldPoint x = random_point(m, 1);
  std::mt19937_64 rng(2);
  MatrixBlocks u(gaussian(n, r, rng));
  for (auto _ : state) {
    MatrixBlocks pu = m->project_tangent_value(x.value(), u);
    benchmark::DoNotOptimize(pu);
  }
}
BENCHMARK(BM_StiefelProject)->Args({100, 5})->Args({1000, 10});

void BM_StiefelRetract(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::Index r = state.range(1);
  auto m = ManifoldDescriptor::stiefel(n, r);
  ManifoldPoint x = random_point(m, 1);
  std::mt19937_64 rng(2);
  TangentVector xi = project_tangent(x, MatrixBlocks(gaussian(n, r, rng)));
  xi *= 0.1 / xi.norm();
  for (auto _ : state) {
    ManifoldPoint y = retract(x, xi);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_StiefelRetract)->Args({100, 5})->Args({1000, 10});

void BM_GeneralizedStiefelRetract(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::Index r = state.range(1);
  std::mt19937_64 rng(3);
  Matrix g = gaussian(n, n, rng);
  Matrix b = g * g.transpose() + 0.5 * Matrix::Identity(n, n);
  auto m = ManifoldDescriptor::generalized_stiefel(n, r, b);
  ManifoldPoint x = random_point(m, 1);
  TangentVector xi = project_tangent(x, MatrixBlocks(gaussian(n, r, rng)));
  xi *= 0.1 / xi.norm();
  for (auto _ : state) {
    ManifoldPoint y = retract(x, xi);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_GeneralizedStiefelRetract)->Args({50, 2})->Args({200, 5});

void BM_RiemannianGradient(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::Index r = state.range(1);
  auto m = ManifoldDescriptor::stiefel(n, r);
  ManifoldPoint x = random_point(m, 1);
  std::mt19937_64 rng(4);
  MatrixBlocks egrad(gaussian(n, r, rng));
  for (auto _ : state) {
    TangentVector g = riemannian_gradient(x, egrad);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_RiemannianGradient)->Args({100, 5})->Args({1000, 10});

void BM_RandomPoint(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::Index r = state.range(1);
  auto m = ManifoldDescriptor::stiefel(n, r);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    ManifoldPoint x = random_point(m, ++seed);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_RandomPoint)->Args({100, 5})->Args({1000, 10});

}  // namespace

BENCHMARK_MAIN();
