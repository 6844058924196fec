#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "descentlab/matrix.hpp"

namespace descentlab::nn {

enum class Activation { relu, tanh, linear };

Activation activation_from_string(const std::string& name);
const char* to_string(Activation activation);

// Layer chain n -> h -> b -> h -> n. The bottleneck must be narrower than
// the input so the model cannot learn the identity map.
struct Architecture {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t bottleneck_dim = 0;
  Activation activation = Activation::relu;
};

void validate(const Architecture& arch);

// 2*(n*h + h*b) weights plus 2h + b + n biases.
std::size_t parameter_count(const Architecture& arch);

struct AutoencoderModel {
  Architecture arch;
  Matrix w1, w2, w3, w4;  // h×n, b×h, h×b, n×h
  std::vector<double> b1, b2, b3, b4;
};

// Per-layer uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)], zero biases.
AutoencoderModel init_model(const Architecture& arch, std::uint64_t seed);

// Activations kept for backprop. `a3` is reused as the output layer's input;
// `output` is the linear reconstruction.
struct ForwardCache {
  Matrix input;
  Matrix a1, a2, a3;  // post-activation values of the three internal layers
  Matrix output;
};

// Reconstruction of `batch`; fills `cache` when given.
Matrix forward(const AutoencoderModel& model, const Matrix& batch, ForwardCache* cache = nullptr);

// Mean of squared differences over all entries.
double mse(const Matrix& pred, const Matrix& target);

struct Gradients {
  Matrix w1, w2, w3, w4;
  std::vector<double> b1, b2, b3, b4;
};

// Gradient of the batch-mean MSE w.r.t. every parameter.
Gradients backward(const AutoencoderModel& model, const ForwardCache& cache, const Matrix& target);
void backward_into(const AutoencoderModel& model, const ForwardCache& cache, const Matrix& target,
                   Gradients& grads);

struct AdamState {
  Gradients m, v;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState make_adam_state(const Architecture& arch);

// Bias-corrected Adam update. Throws on non-finite gradients.
void adam_step(AutoencoderModel& model, const Gradients& grads, AdamState& state, double lr);

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t epochs = 200;
  std::size_t batch_size = 10;
  std::uint64_t seed = 0;
  bool shuffle_each_epoch = true;
  std::size_t eval_period = 1;
  bool capture_embeddings = false;
};

struct TrainRecord {
  std::vector<std::size_t> eval_epochs;  // epoch index of each recorded eval
  std::vector<double> train_mse;         // raw full-pass train MSE per eval
  std::vector<double> test_mse;          // raw test MSE per eval
  double final_raw_train = 0.0;
  double final_raw_test = 0.0;
  double final_norm_train = 0.0;  // raw / variance denominator of the same set
  double final_norm_test = 0.0;
  std::optional<Matrix> train_embeddings;
  std::optional<Matrix> test_embeddings;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
};

// Mini-batch Adam on reconstruction MSE of the train set (inputs = targets).
// The test set is only ever evaluated, never trained on. Raw losses are
// recorded every eval_period epochs and at the final epoch; normalized
// losses are computed once, after training.
TrainRecord train(AutoencoderModel& model, const Matrix& train_set, const Matrix& test_set,
                  const TrainConfig& cfg);

// Encoder output at the bottleneck layer.
Matrix embed(const AutoencoderModel& model, const Matrix& data);

// Checkpoint: versioned header with architecture and seed, raw little-endian
// parameter payload.
void save_model(const AutoencoderModel& model, const std::string& path, std::uint64_t seed = 0);
AutoencoderModel load_model(const std::string& path, std::uint64_t* seed_out = nullptr);

}  // namespace descentlab::nn
