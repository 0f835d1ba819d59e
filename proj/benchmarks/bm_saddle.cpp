#include <benchmark/benchmark.h>

#include "sparsereg/datagen.hpp"
#include "sparsereg/metrics.hpp"
#include "sparsereg/saddle.hpp"

using namespace sparsereg;

namespace {

Dataset instance(Eigen::Index n, Eigen::Index p, Eigen::Index k) {
  SyntheticSpec spec;
  spec.n = n;
  spec.p = p;
  spec.k_true = k;
  spec.covariance = CovarianceKind::Identity;
  spec.snr = 6.0;
  spec.seed = 1;
  return sample_dataset(spec);
}

void BM_SubgradientSolve(benchmark::State& state) {
  const auto n = state.range(0);
  const auto p = state.range(1);
  const Eigen::Index k = std::max<Eigen::Index>(5, p / 100);
  const auto data = instance(n, p, k);
  SubgradientConfig cfg;
  cfg.gamma = 0.5 * gamma_zero_normalized(data, k);
  cfg.t_max = 100;
  cfg.gap_tol = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(subgradient_solve(data, LossModel{}, k, cfg));
  }
  state.SetItemsProcessed(state.iterations() * cfg.t_max);
}

void BM_PartialMinSupport(benchmark::State& state) {
  const auto p = state.range(0);
  const auto data = instance(500, p, 10);
  Eigen::VectorXd alpha = -data.Y;
  for (auto _ : state) {
    benchmark::DoNotOptimize(partial_min_support(alpha, data, 1.0, 10));
  }
}

}  // namespace

BENCHMARK(BM_SubgradientSolve)
    ->Args({200, 1000})
    ->Args({500, 2000})
    ->Args({1000, 5000})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PartialMinSupport)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);
