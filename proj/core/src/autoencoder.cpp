#include "descentlab/autoencoder.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "descentlab/rng.hpp"

namespace descentlab::nn {

namespace {

void apply_activation(Matrix& m, Activation act) {
  double* p = m.data();
  const std::size_t n = m.size();
  switch (act) {
    case Activation::relu:
      for (std::size_t i = 0; i < n; ++i) p[i] = p[i] > 0.0 ? p[i] : 0.0;
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < n; ++i) p[i] = std::tanh(p[i]);
      break;
    case Activation::linear:
      break;
  }
}

// Multiplies each delta entry by the activation derivative, expressed via
// the stored post-activation value.
void apply_activation_grad(Matrix& delta, const Matrix& post, Activation act) {
  double* d = delta.data();
  const double* a = post.data();
  const std::size_t n = delta.size();
  switch (act) {
    case Activation::relu:
      for (std::size_t i = 0; i < n; ++i) {
        if (a[i] <= 0.0) d[i] = 0.0;
      }
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < n; ++i) d[i] *= 1.0 - a[i] * a[i];
      break;
    case Activation::linear:
      break;
  }
}

void column_sums(const Matrix& m, std::vector<double>& out) {
  out.assign(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += row[j];
  }
}

void zero(Matrix& m) { std::fill(m.storage().begin(), m.storage().end(), 0.0); }

Gradients make_gradients(const Architecture& arch) {
  Gradients g;
  g.w1 = Matrix(arch.hidden_dim, arch.input_dim);
  g.w2 = Matrix(arch.bottleneck_dim, arch.hidden_dim);
  g.w3 = Matrix(arch.hidden_dim, arch.bottleneck_dim);
  g.w4 = Matrix(arch.input_dim, arch.hidden_dim);
  g.b1.assign(arch.hidden_dim, 0.0);
  g.b2.assign(arch.bottleneck_dim, 0.0);
  g.b3.assign(arch.hidden_dim, 0.0);
  g.b4.assign(arch.input_dim, 0.0);
  return g;
}

void fill_uniform(Matrix& w, double bound, Rng& rng) {
  for (double& x : w.storage()) x = bound * (2.0 * rng.next_double() - 1.0);
}

// Full-pass MSE in row blocks so temporaries stay small at large widths.
double eval_mse(const AutoencoderModel& model, const Matrix& data, std::size_t block = 512) {
  double total = 0.0;
  Matrix chunk;
  for (std::size_t start = 0; start < data.rows(); start += block) {
    const std::size_t rows = std::min(block, data.rows() - start);
    chunk = Matrix(rows, data.cols());
    std::memcpy(chunk.data(), data.row(start), rows * data.cols() * sizeof(double));
    const Matrix recon = forward(model, chunk);
    for (std::size_t i = 0; i < recon.size(); ++i) {
      const double diff = recon.data()[i] - chunk.data()[i];
      total += diff * diff;
    }
  }
  return total / static_cast<double>(data.size());
}

// Denominator of the post-training loss normalization: the variance of the
// dataset around its scalar mean, pooled over all entries.
double variance_denominator(const Matrix& data) {
  const double n = static_cast<double>(data.size());
  double mean = 0.0;
  for (double x : data.storage()) mean += x;
  mean /= n;
  double denom = 0.0;
  for (double x : data.storage()) {
    const double d = x - mean;
    denom += d * d;
  }
  return denom / n;
}

}  // namespace

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "linear") return Activation::linear;
  throw std::invalid_argument("unknown activation '" + name + "' (expected relu, tanh or linear)");
}

const char* to_string(Activation activation) {
  switch (activation) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::linear: return "linear";
  }
  return "unknown";
}

void validate(const Architecture& arch) {
  if (arch.input_dim == 0 || arch.hidden_dim == 0 || arch.bottleneck_dim == 0) {
    throw std::invalid_argument("all layer sizes must be positive");
  }
  if (arch.bottleneck_dim >= arch.input_dim) {
    throw std::invalid_argument("bottleneck_dim must be smaller than input_dim (under-complete)");
  }
}

std::size_t parameter_count(const Architecture& arch) {
  const std::size_t n = arch.input_dim, h = arch.hidden_dim, b = arch.bottleneck_dim;
  return 2 * (n * h + h * b) + 2 * h + b + n;
}

AutoencoderModel init_model(const Architecture& arch, std::uint64_t seed) {
  validate(arch);
  AutoencoderModel model;
  model.arch = arch;
  const std::size_t n = arch.input_dim, h = arch.hidden_dim, b = arch.bottleneck_dim;
  model.w1 = Matrix(h, n);
  model.w2 = Matrix(b, h);
  model.w3 = Matrix(h, b);
  model.w4 = Matrix(n, h);
  model.b1.assign(h, 0.0);
  model.b2.assign(b, 0.0);
  model.b3.assign(h, 0.0);
  model.b4.assign(n, 0.0);
  Rng rng = Rng::substream(seed, streams::model_init);
  fill_uniform(model.w1, 1.0 / std::sqrt(static_cast<double>(n)), rng);
  fill_uniform(model.w2, 1.0 / std::sqrt(static_cast<double>(h)), rng);
  fill_uniform(model.w3, 1.0 / std::sqrt(static_cast<double>(b)), rng);
  fill_uniform(model.w4, 1.0 / std::sqrt(static_cast<double>(h)), rng);
  return model;
}

Matrix forward(const AutoencoderModel& model, const Matrix& batch, ForwardCache* cache) {
  if (batch.cols() != model.arch.input_dim) {
    throw std::invalid_argument("batch width " + std::to_string(batch.cols()) +
                                " does not match input_dim " +
                                std::to_string(model.arch.input_dim));
  }
  const Activation act = model.arch.activation;
  Matrix a1, a2, a3, out;
  matmul_nt(batch, model.w1, a1);
  add_row_bias(a1, model.b1);
  apply_activation(a1, act);

  matmul_nt(a1, model.w2, a2);
  add_row_bias(a2, model.b2);
  apply_activation(a2, act);

  matmul_nt(a2, model.w3, a3);
  add_row_bias(a3, model.b3);
  apply_activation(a3, act);

  matmul_nt(a3, model.w4, out);
  add_row_bias(out, model.b4);

  if (cache != nullptr) {
    cache->input = batch;
    cache->a1 = std::move(a1);
    cache->a2 = std::move(a2);
    cache->a3 = std::move(a3);
    cache->output = out;
  }
  return out;
}

double mse(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw std::invalid_argument("mse requires equal shapes");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred.data()[i] - target.data()[i];
    total += d * d;
  }
  return total / static_cast<double>(pred.size());
}

void backward_into(const AutoencoderModel& model, const ForwardCache& cache, const Matrix& target,
                   Gradients& grads) {
  if (cache.output.rows() != target.rows() || cache.output.cols() != target.cols()) {
    throw std::invalid_argument("backward: cache does not match target shape");
  }
  if (cache.input.cols() != model.arch.input_dim ||
      cache.a1.cols() != model.arch.hidden_dim ||
      cache.a2.cols() != model.arch.bottleneck_dim) {
    throw std::invalid_argument("backward: cache does not match model architecture");
  }
  const Activation act = model.arch.activation;
  const double scale = 2.0 / static_cast<double>(cache.output.size());

  Matrix delta(cache.output.rows(), cache.output.cols());
  for (std::size_t i = 0; i < delta.size(); ++i) {
    delta.data()[i] = scale * (cache.output.data()[i] - target.data()[i]);
  }

  zero(grads.w1);
  zero(grads.w2);
  zero(grads.w3);
  zero(grads.w4);

  // output layer (linear)
  matmul_tn_acc(delta, cache.a3, grads.w4);
  column_sums(delta, grads.b4);
  Matrix d3;
  matmul_nn(delta, model.w4, d3);
  apply_activation_grad(d3, cache.a3, act);

  matmul_tn_acc(d3, cache.a2, grads.w3);
  column_sums(d3, grads.b3);
  Matrix d2;
  matmul_nn(d3, model.w3, d2);
  apply_activation_grad(d2, cache.a2, act);

  matmul_tn_acc(d2, cache.a1, grads.w2);
  column_sums(d2, grads.b2);
  Matrix d1;
  matmul_nn(d2, model.w2, d1);
  apply_activation_grad(d1, cache.a1, act);

  matmul_tn_acc(d1, cache.input, grads.w1);
  column_sums(d1, grads.b1);
}

Gradients backward(const AutoencoderModel& model, const ForwardCache& cache,
                   const Matrix& target) {
  Gradients grads = make_gradients(model.arch);
  backward_into(model, cache, target, grads);
  return grads;
}

AdamState make_adam_state(const Architecture& arch) {
  AdamState state;
  state.m = make_gradients(arch);
  state.v = make_gradients(arch);
  return state;
}

namespace {

// Returns the sum of gradient entries; any non-finite entry poisons it.
double adam_update_span(std::span<double> param, std::span<const double> grad,
                        std::span<double> m, std::span<double> v, double lr, double bc1,
                        double bc2, double beta1, double beta2, double eps) {
  double acc = 0.0;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    acc += g;
    m[i] = beta1 * m[i] + (1.0 - beta1) * g;
    v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    param[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
  return acc;
}

}  // namespace

void adam_step(AutoencoderModel& model, const Gradients& grads, AdamState& state, double lr) {
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  double acc = 0.0;
  acc += adam_update_span(model.w1.storage(), grads.w1.storage(), state.m.w1.storage(),
                          state.v.w1.storage(), lr, bc1, bc2, state.beta1, state.beta2,
                          state.epsilon);
  acc += adam_update_span(model.b1, grads.b1, state.m.b1, state.v.b1, lr, bc1, bc2, state.beta1,
                          state.beta2, state.epsilon);
  acc += adam_update_span(model.w2.storage(), grads.w2.storage(), state.m.w2.storage(),
                          state.v.w2.storage(), lr, bc1, bc2, state.beta1, state.beta2,
                          state.epsilon);
  acc += adam_update_span(model.b2, grads.b2, state.m.b2, state.v.b2, lr, bc1, bc2, state.beta1,
                          state.beta2, state.epsilon);
  acc += adam_update_span(model.w3.storage(), grads.w3.storage(), state.m.w3.storage(),
                          state.v.w3.storage(), lr, bc1, bc2, state.beta1, state.beta2,
                          state.epsilon);
  acc += adam_update_span(model.b3, grads.b3, state.m.b3, state.v.b3, lr, bc1, bc2, state.beta1,
                          state.beta2, state.epsilon);
  acc += adam_update_span(model.w4.storage(), grads.w4.storage(), state.m.w4.storage(),
                          state.v.w4.storage(), lr, bc1, bc2, state.beta1, state.beta2,
                          state.epsilon);
  acc += adam_update_span(model.b4, grads.b4, state.m.b4, state.v.b4, lr, bc1, bc2, state.beta1,
                          state.beta2, state.epsilon);
  if (!std::isfinite(acc)) {
    throw std::runtime_error("adam_step: non-finite gradient at optimizer step " +
                             std::to_string(state.step));
  }
}

TrainRecord train(AutoencoderModel& model, const Matrix& train_set, const Matrix& test_set,
                  const TrainConfig& cfg) {
  if (train_set.cols() != model.arch.input_dim || test_set.cols() != model.arch.input_dim) {
    throw std::invalid_argument("train: dataset width does not match architecture input_dim");
  }
  if (cfg.batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  if (cfg.eval_period == 0) throw std::invalid_argument("eval_period must be positive");

  const auto start_time = std::chrono::steady_clock::now();
  TrainRecord record;
  record.seed = cfg.seed;

  const std::size_t n_rows = train_set.rows();
  std::vector<std::size_t> order(n_rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng = Rng::substream(cfg.seed, streams::shuffle);

  AdamState adam = make_adam_state(model.arch);
  Gradients grads = make_gradients(model.arch);
  ForwardCache cache;
  Matrix batch;

  const auto record_eval = [&](std::size_t epoch) {
    const double train_loss = eval_mse(model, train_set);
    const double test_loss = eval_mse(model, test_set);
    if (!std::isfinite(train_loss) || !std::isfinite(test_loss)) {
      throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch));
    }
    record.eval_epochs.push_back(epoch);
    record.train_mse.push_back(train_loss);
    record.test_mse.push_back(test_loss);
  };

  if (cfg.epochs == 0) {
    record_eval(0);
  }
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.shuffle_each_epoch) {
      for (std::size_t i = n_rows; i > 1; --i) {
        std::swap(order[i - 1], order[shuffle_rng.next_below(i)]);
      }
    }
    for (std::size_t start = 0; start < n_rows; start += cfg.batch_size) {
      const std::size_t rows = std::min(cfg.batch_size, n_rows - start);
      batch = Matrix(rows, train_set.cols());
      for (std::size_t i = 0; i < rows; ++i) {
        std::memcpy(batch.row(i), train_set.row(order[start + i]),
                    train_set.cols() * sizeof(double));
      }
      forward(model, batch, &cache);
      backward_into(model, cache, batch, grads);
      adam_step(model, grads, adam, cfg.learning_rate);
    }
    if (epoch % cfg.eval_period == 0 || epoch == cfg.epochs) {
      record_eval(epoch);
    }
  }

  record.final_raw_train = record.train_mse.back();
  record.final_raw_test = record.test_mse.back();
  record.final_norm_train = record.final_raw_train / variance_denominator(train_set);
  record.final_norm_test = record.final_raw_test / variance_denominator(test_set);
  if (cfg.capture_embeddings) {
    record.train_embeddings = embed(model, train_set);
    record.test_embeddings = embed(model, test_set);
  }
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  return record;
}

Matrix embed(const AutoencoderModel& model, const Matrix& data) {
  if (data.cols() != model.arch.input_dim) {
    throw std::invalid_argument("embed: data width does not match input_dim");
  }
  const Activation act = model.arch.activation;
  Matrix out(data.rows(), model.arch.bottleneck_dim);
  const std::size_t block = 512;
  Matrix chunk, a1, a2;
  for (std::size_t start = 0; start < data.rows(); start += block) {
    const std::size_t rows = std::min(block, data.rows() - start);
    chunk = Matrix(rows, data.cols());
    std::memcpy(chunk.data(), data.row(start), rows * data.cols() * sizeof(double));
    matmul_nt(chunk, model.w1, a1);
    add_row_bias(a1, model.b1);
    apply_activation(a1, act);
    matmul_nt(a1, model.w2, a2);
    add_row_bias(a2, model.b2);
    apply_activation(a2, act);
    std::memcpy(out.row(start), a2.data(), rows * a2.cols() * sizeof(double));
  }
  return out;
}

namespace {

constexpr const char* kModelMagic = "DESCENTLAB-MODEL v1";

void write_block(std::ofstream& out, const Matrix& m) {
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
}

void write_block(std::ofstream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_block(std::ifstream& in, Matrix& m) {
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(m.size() * sizeof(double)));
}

void read_block(std::ifstream& in, std::vector<double>& v) {
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
}

}  // namespace

void save_model(const AutoencoderModel& model, const std::string& path, std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  nlohmann::json header = {
      {"input_dim", model.arch.input_dim},
      {"hidden_dim", model.arch.hidden_dim},
      {"bottleneck_dim", model.arch.bottleneck_dim},
      {"activation", to_string(model.arch.activation)},
      {"seed", seed},
      {"param_count", parameter_count(model.arch)},
      {"byte_order", "little-endian"},
  };
  out << kModelMagic << "\n" << header.dump() << "\n";
  write_block(out, model.w1);
  write_block(out, model.b1);
  write_block(out, model.w2);
  write_block(out, model.b2);
  write_block(out, model.w3);
  write_block(out, model.b3);
  write_block(out, model.w4);
  write_block(out, model.b4);
  if (!out) throw std::runtime_error("failed to write model to '" + path + "'");
}

AutoencoderModel load_model(const std::string& path, std::uint64_t* seed_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
  std::string magic, header_line;
  std::getline(in, magic);
  if (magic != kModelMagic) {
    throw std::runtime_error("'" + path + "' is not a descentlab model checkpoint");
  }
  std::getline(in, header_line);
  const nlohmann::json header = nlohmann::json::parse(header_line);
  Architecture arch;
  arch.input_dim = header.at("input_dim").get<std::size_t>();
  arch.hidden_dim = header.at("hidden_dim").get<std::size_t>();
  arch.bottleneck_dim = header.at("bottleneck_dim").get<std::size_t>();
  arch.activation = activation_from_string(header.at("activation").get<std::string>());
  validate(arch);
  if (seed_out != nullptr) *seed_out = header.at("seed").get<std::uint64_t>();

  AutoencoderModel model;
  model.arch = arch;
  model.w1 = Matrix(arch.hidden_dim, arch.input_dim);
  model.w2 = Matrix(arch.bottleneck_dim, arch.hidden_dim);
  model.w3 = Matrix(arch.hidden_dim, arch.bottleneck_dim);
  model.w4 = Matrix(arch.input_dim, arch.hidden_dim);
  model.b1.assign(arch.hidden_dim, 0.0);
  model.b2.assign(arch.bottleneck_dim, 0.0);
  model.b3.assign(arch.hidden_dim, 0.0);
  model.b4.assign(arch.input_dim, 0.0);
  read_block(in, model.w1);
  read_block(in, model.b1);
  read_block(in, model.w2);
  read_block(in, model.b2);
  read_block(in, model.w3);
  read_block(in, model.b3);
  read_block(in, model.w4);
  read_block(in, model.b4);
  if (!in) throw std::runtime_error("truncated model file '" + path + "'");
  if (!all_finite(model.w1) || !all_finite(model.w2) || !all_finite(model.w3) ||
      !all_finite(model.w4)) {
    throw std::runtime_error("model file '" + path + "' contains non-finite parameters");
  }
  return model;
}

}  // namespace descentlab::nn
