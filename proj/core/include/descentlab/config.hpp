#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "descentlab/autoencoder.hpp"
#include "descentlab/datagen.hpp"
#include "descentlab/sweep.hpp"

namespace descentlab::config {

// Config problems map to exit code 2; runtime failures to 3.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Profile { desk, paper };

Profile profile_from_string(const std::string& name);
const char* to_string(Profile profile);

struct RealDataBlock {
  std::string csv_path;
  std::optional<std::string> batch_column;
  std::optional<std::string> label_column;
  std::vector<std::string> feature_columns;  // empty: all non-batch/label columns
  std::string delimiter = ",";
  std::size_t top_features = 1000;
  std::string source_batch;  // domain-shift source batch name
  std::size_t n_train = 5000;
};

struct ExperimentConfig {
  Profile profile = Profile::desk;
  std::string output_dir = "out";
  datagen::ScenarioParams scenario;
  std::optional<RealDataBlock> real;  // present: real-data path
  datagen::SubspaceSpec data;
  nn::Architecture model;
  nn::TrainConfig train;
  sweep::Axis axis = sweep::Axis::hidden_dim;
  std::vector<std::size_t> axis_values;
  std::vector<std::size_t> grid_bottlenecks;
  std::vector<std::uint64_t> seeds;
  std::size_t parallelism = 0;
  bool save_embeddings = false;
  bool save_models = false;
};

// Parses, defaults and validates a config file. Unknown keys name their
// nearest valid alternative; constraint violations are reported in one
// batch. Every default traces back to the published hyperparameter table
// (desk profile scales it down).
ExperimentConfig validate_config(const std::string& path);
ExperimentConfig validate_config_text(const std::string& json_text);

// Fully-defaulted JSON form; re-validating it reproduces the same config.
std::string emit_config(const ExperimentConfig& cfg);

sweep::SweepSpec to_sweep_spec(const ExperimentConfig& cfg);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace descentlab::config
