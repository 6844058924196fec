#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "descentlab/autoencoder.hpp"
#include "descentlab/datagen.hpp"

namespace descentlab::sweep {

enum class Axis { hidden_dim, bottleneck_dim, grid, epochs, n_train };

Axis axis_from_string(const std::string& name);
const char* to_string(Axis axis);

// Inclusive integer range {from, from+step, ...} capped at `to`.
std::vector<std::size_t> expand_range(std::size_t from, std::size_t to, std::size_t step);

struct SweepSpec {
  Axis axis = Axis::hidden_dim;
  std::vector<std::size_t> axis_values;       // hidden dims, bottleneck dims or n_train values
  std::vector<std::size_t> grid_bottlenecks;  // second grid dimension (grid axis only)
  datagen::SubspaceSpec data;
  datagen::ScenarioParams scenario;
  nn::Architecture base_arch;  // input_dim is overwritten from data.ambient_dim
  nn::TrainConfig train;
  std::vector<std::uint64_t> seeds;
  std::size_t parallelism = 0;  // 0: DESCENTLAB_THREADS or hardware concurrency
  bool capture_embeddings = false;
  bool capture_models = false;  // keep trained models in RunResult for checkpointing
};

struct RunKey {
  std::string scenario_hash;
  double axis_value = 0.0;
  double axis_value2 = 0.0;  // grid bottleneck; 0 when unused
  std::uint64_t seed = 0;

  bool operator==(const RunKey&) const = default;
};

struct RunResult {
  RunKey key;
  bool failed = false;
  std::string error;
  nn::TrainRecord record;
  std::optional<double> roc_auc;  // anomaly scenarios only
  std::optional<nn::AutoencoderModel> model;  // only when capture_models is set
};

struct CurvePoint {
  double x = 0.0;
  double mean_train = 0.0;
  double mean_test = 0.0;
  double stderr_train = 0.0;
  double stderr_test = 0.0;
  std::size_t n_seeds = 0;
};

// Aggregated sweep output; losses are normalized, stderr is the sample
// standard deviation over seeds divided by sqrt(n_seeds).
struct CurveTable {
  std::string x_name;
  std::vector<CurvePoint> rows;
};

struct GridPoint {
  double hidden = 0.0;
  double bottleneck = 0.0;
  double mean_train = 0.0;
  double mean_test = 0.0;
  double stderr_train = 0.0;
  double stderr_test = 0.0;
  std::size_t n_seeds = 0;
};

struct SweepOutput {
  CurveTable curve;             // empty for the grid axis
  std::vector<GridPoint> grid;  // grid axis only
  std::vector<RunResult> runs;  // job order: axis-major, seed-minor
  // Mean ROC-AUC per axis value over seeds (anomaly scenarios only).
  std::vector<double> roc_auc_mean;
};

// Generic keyed scheduler: executes jobs with at most `parallelism` workers,
// captures exceptions as failed runs, and returns results in job order so
// aggregation is independent of completion order. Duplicate keys are
// rejected.
struct Job {
  RunKey key;
  std::function<RunResult()> work;
};
std::vector<RunResult> schedule(std::vector<Job> jobs, std::size_t parallelism);

// Aggregates job-ordered results (axis-major, seed-minor) into a curve and
// per-axis-value mean ROC-AUC; shared by synthetic and external-data sweeps.
SweepOutput aggregate_curve(std::vector<RunResult> runs,
                            const std::vector<std::size_t>& axis_values, std::size_t n_seeds,
                            const std::string& x_name);

// One model per (axis value, seed); every axis value within a seed shares
// the same dataset realization.
SweepOutput run_model_wise(const SweepSpec& spec);

// Aggregates per-seed training records into a curve over recorded epochs;
// the per-seed denominators normalize the raw recorded losses.
CurveTable aggregate_epoch_curve(const std::vector<RunResult>& runs,
                                 const std::vector<double>& train_denominators,
                                 const std::vector<double>& test_denominators);

// Single training run per seed with periodic evaluation; the curve is over
// recorded epochs.
SweepOutput run_epoch_wise(const SweepSpec& spec);

// Axis of training-set sizes; smaller sets are prefixes of larger ones
// within a seed.
SweepOutput run_sample_wise(const SweepSpec& spec);

void write_runs_csv(const std::string& path, const SweepSpec& spec,
                    const std::vector<RunResult>& runs);
void write_curve_csv(const std::string& path, const CurveTable& curve);
void write_grid_csv(const std::string& path, const std::vector<GridPoint>& grid);
CurveTable read_curve_csv(const std::string& path);

std::size_t default_parallelism();

}  // namespace descentlab::sweep
