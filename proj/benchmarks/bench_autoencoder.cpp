#include <benchmark/benchmark.h>

#include "descentlab/autoencoder.hpp"
#include "descentlab/rng.hpp"

using namespace descentlab;

namespace {

Matrix random_batch(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Matrix m(rows, cols);
  Rng rng(seed);
  for (double& x : m.storage()) x = rng.next_normal();
  return m;
}

void BM_Forward(benchmark::State& state) {
  const std::size_t hidden = static_cast<std::size_t>(state.range(0));
  const nn::AutoencoderModel model = nn::init_model({50, hidden, 25}, 1);
  const Matrix batch = random_batch(10, 50, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nn::forward(model, batch));
  }
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_Forward)->Arg(16)->Arg(64)->Arg(200);

void BM_TrainStep(benchmark::State& state) {
  const std::size_t hidden = static_cast<std::size_t>(state.range(0));
  nn::AutoencoderModel model = nn::init_model({50, hidden, 25}, 1);
  nn::AdamState adam = nn::make_adam_state(model.arch);
  const Matrix batch = random_batch(10, 50, 2);
  nn::ForwardCache cache;
  for (auto _ : state) {
    nn::forward(model, batch, &cache);
    const nn::Gradients grads = nn::backward(model, cache, batch);
    nn::adam_step(model, grads, adam, 1e-4);
  }
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_TrainStep)->Arg(16)->Arg(64)->Arg(200);

void BM_TrainEpoch(benchmark::State& state) {
  const std::size_t hidden = static_cast<std::size_t>(state.range(0));
  const Matrix data = random_batch(500, 50, 3);
  for (auto _ : state) {
    state.PauseTiming();
    nn::AutoencoderModel model = nn::init_model({50, hidden, 25}, 1);
    state.ResumeTiming();
    nn::TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 10;
    cfg.eval_period = 1;
    cfg.seed = 1;
    benchmark::DoNotOptimize(nn::train(model, data, data, cfg));
  }
  state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(BM_TrainEpoch)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
