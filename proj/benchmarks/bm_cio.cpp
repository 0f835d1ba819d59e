#include <benchmark/benchmark.h>

#include "sparsereg/cio.hpp"
#include "sparsereg/datagen.hpp"

using namespace sparsereg;

namespace {

Dataset instance(Eigen::Index n, Eigen::Index p, Eigen::Index k) {
  SyntheticSpec spec;
  spec.n = n;
  spec.p = p;
  spec.k_true = k;
  spec.covariance = CovarianceKind::Toeplitz;
  spec.rho = 0.2;
  spec.snr = 6.0;
  spec.seed = 2;
  return sample_dataset(spec);
}

void BM_InnerValueGrad(benchmark::State& state) {
  const auto n = state.range(0);
  const auto data = instance(n, 200, 10);
  Support s;
  for (Eigen::Index j = 0; j < 10; ++j) s.selected.push_back(j * 3);
  s.budget = 10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(inner_value_grad(s, data, LossModel{}, 1.0));
  }
}

void BM_CuttingPlaneSolve(benchmark::State& state) {
  const auto p = state.range(0);
  const auto data = instance(400, p, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cutting_plane_solve(data, LossModel{}, 8, 0.1, nullptr, 1e-4, 30.0));
  }
}

}  // namespace

BENCHMARK(BM_InnerValueGrad)->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CuttingPlaneSolve)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
