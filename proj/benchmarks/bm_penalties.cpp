#include <benchmark/benchmark.h>

#include "sparsereg/datagen.hpp"
#include "sparsereg/penalties.hpp"

using namespace sparsereg;

namespace {

Dataset instance(Eigen::Index n, Eigen::Index p) {
  SyntheticSpec spec;
  spec.n = n;
  spec.p = p;
  spec.k_true = std::max<Eigen::Index>(5, p / 100);
  spec.covariance = CovarianceKind::Toeplitz;
  spec.rho = 0.2;
  spec.snr = 6.0;
  spec.seed = 3;
  return sample_dataset(spec);
}

void BM_LassoPath(benchmark::State& state) {
  const auto data = instance(state.range(0), state.range(1));
  LossModel ols;
  const auto grid = lambda_grid(data, ols, PenaltyFamily::L1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cd_fit(data, ols, PenaltyFamily::L1, grid));
  }
}

void BM_McpPath(benchmark::State& state) {
  const auto data = instance(state.range(0), state.range(1));
  LossModel ols;
  const auto grid = lambda_grid(data, ols, PenaltyFamily::Mcp);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cd_fit(data, ols, PenaltyFamily::Mcp, grid));
  }
}

void BM_UnivariateProx(benchmark::State& state) {
  PenaltySpec spec;
  spec.family = PenaltyFamily::Scad;
  spec.lambda = 0.8;
  spec.gamma_shape = 3.7;
  double z = -6.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(univariate_prox(spec, z, 1.3));
    z += 0.1;
    if (z > 6.0) z = -6.0;
  }
}

}  // namespace

BENCHMARK(BM_LassoPath)->Args({500, 1000})->Args({1000, 5000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McpPath)->Args({500, 1000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UnivariateProx);
