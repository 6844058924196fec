#include <benchmark/benchmark.h>

#include "descentlab/metrics.hpp"
#include "descentlab/rng.hpp"

using namespace descentlab;

namespace {

void BM_KnnDat(benchmark::State& state) {
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  Matrix emb(m, 25);
  Rng rng(1);
  for (double& x : emb.storage()) x = rng.next_normal();
  std::vector<int> batches(m);
  for (std::size_t i = 0; i < m; ++i) batches[i] = i < m / 2 ? 0 : 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(metrics::knn_dat(emb, batches, {10, 1}));
  }
  state.SetComplexityN(static_cast<std::int64_t>(m));
}
BENCHMARK(BM_KnnDat)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond)->Complexity();

void BM_RocAuc(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  std::vector<metrics::ScoredSample> scored(n);
  for (std::size_t i = 0; i < n; ++i) scored[i] = {rng.next_double(), rng.next_bernoulli(0.3)};
  scored[0].is_anomaly = true;
  scored[1].is_anomaly = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(metrics::roc_auc(scored));
  }
}
BENCHMARK(BM_RocAuc)->Arg(2000)->Arg(20000);

}  // namespace
