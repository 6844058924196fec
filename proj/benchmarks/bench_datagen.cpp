#include <benchmark/benchmark.h>

#include "descentlab/datagen.hpp"

using namespace descentlab;

namespace {

void BM_BuildScenario(benchmark::State& state) {
  datagen::SubspaceSpec spec;
  spec.n_train = static_cast<std::size_t>(state.range(0));
  spec.n_test = spec.n_train;
  spec.seed = 1;
  datagen::ScenarioParams params;
  params.scenario = datagen::Scenario::sample_noise;
  params.probability = 0.9;
  params.snr_db = -15.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(datagen::build_scenario(spec, params));
  }
  state.SetItemsProcessed(state.iterations() * spec.n_train);
}
BENCHMARK(BM_BuildScenario)->Arg(2000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_ShiftedProjection(benchmark::State& state) {
  datagen::SubspaceSpec spec;
  spec.seed = 1;
  const datagen::ProjectionMatrix base = datagen::sample_projection(spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(datagen::make_shifted_projection(base, 2.0, 7));
  }
}
BENCHMARK(BM_ShiftedProjection);

}  // namespace
