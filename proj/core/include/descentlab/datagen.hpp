#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "descentlab/matrix.hpp"

namespace descentlab::datagen {

// Low-dimensional Gaussian subspace embedded in ambient space: z in R^d,
// samples x = theta * D z with D an n×d Gaussian projection.
struct SubspaceSpec {
  std::size_t latent_dim = 20;
  std::size_t ambient_dim = 50;
  std::size_t n_train = 5000;
  std::size_t n_test = 10000;
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument when n <= d or a sample count is zero.
void validate(const SubspaceSpec& spec);

enum class ProjectionKind { base, perturbation, shifted };

struct ProjectionMatrix {
  Matrix entries;  // ambient_dim × latent_dim
  ProjectionKind kind = ProjectionKind::base;
  double shift_scale = 0.0;
};

enum class NoiseMode { sample, feature };

struct NoiseSpec {
  NoiseMode mode = NoiseMode::sample;
  double probability = 0.0;
  double snr_db = 0.0;
  double linear_snr = 1.0;
  double theta = 1.0;
};

// theta is derived from (snr_db, d) at construction so downstream steps are
// pure arithmetic. Feature mode with p = 0 leaves theta unused (set to 0).
NoiseSpec make_sample_noise_spec(double probability, double snr_db, std::size_t latent_dim);
NoiseSpec make_feature_noise_spec(double probability, double snr_db, std::size_t latent_dim);

struct AnomalySpec {
  double probability = 0.0;
  double sar_db = 0.0;
  double theta = 1.0;
};

AnomalySpec make_anomaly_spec(double probability, double sar_db, std::size_t latent_dim);

enum class SampleFlag : std::uint8_t { clean = 0, noisy = 1, anomaly = 2 };

const char* to_string(SampleFlag flag);

struct Dataset {
  Matrix samples;                     // N × n
  std::vector<SampleFlag> flags;      // length N
  std::vector<int> batch_labels;      // length N, 0 unless multi-batch
  std::optional<std::vector<std::uint8_t>> noisy_feature_mask;  // length n, feature mode only

  std::size_t n_samples() const { return samples.rows(); }
  std::size_t n_features() const { return samples.cols(); }
  std::size_t count_flag(SampleFlag f) const;
};

// dB -> linear amplitude ratio, 10^(db/20).
double db_to_linear(double snr_db);

// Closed-form theta factors: signal scale needed to hit a requested SNR
// against unit-variance Gaussian noise.
double theta_sample_noise(double snr_db, std::size_t latent_dim);
double theta_feature_noise(double snr_db, std::size_t latent_dim, double probability);
double theta_shifted(double snr_db, std::size_t latent_dim, double shift_scale);

// N×d i.i.d. standard normal latents; `stream` picks the substream.
Matrix sample_latents(const SubspaceSpec& spec, std::uint64_t stream);

ProjectionMatrix sample_projection(const SubspaceSpec& spec, std::uint64_t seed_offset = 0);

// (D + s*D') / sqrt(1 + s^2) with a fresh Gaussian D'. Unit entry variance
// is preserved for any s >= 0.
ProjectionMatrix make_shifted_projection(const ProjectionMatrix& base, double shift_scale,
                                         std::uint64_t seed);

// Adds standard-normal noise to each row independently with probability p
// and flags it noisy. Rows are expected to be theta-scaled already.
Dataset apply_sample_noise(const Dataset& clean, const NoiseSpec& noise, std::uint64_t seed);

// Picks floor(n*p) feature columns once, uniformly without replacement, and
// adds standard-normal noise to those coordinates of every row.
Dataset apply_feature_noise(const Dataset& clean, const NoiseSpec& noise, std::uint64_t seed);

// Replaces a uniformly chosen floor(N*p) subset of rows with standard-normal
// draws and flags them anomaly.
Dataset inject_anomalies(const Dataset& clean, const AnomalySpec& spec, std::uint64_t seed);

enum class Scenario { sample_noise, feature_noise, domain_shift, anomaly };

Scenario scenario_from_string(const std::string& name);
const char* to_string(Scenario scenario);

struct ScenarioParams {
  Scenario scenario = Scenario::sample_noise;
  double probability = 0.0;  // noise / anomaly fraction
  double snr_db = 0.0;
  double sar_db = 0.0;          // anomaly only
  double shift_scale = 0.0;     // domain shift only
  double shift_noise_p = 0.0;   // optional extra sample noise on a shifted train set
  double shift_noise_snr_db = 0.0;
};

struct ScenarioData {
  Dataset train;
  Dataset test;
  double theta = 1.0;          // scale applied to clean projections
  ProjectionMatrix projection; // D used for the train set
  std::optional<ProjectionMatrix> test_projection;  // D'' when shifted
};

// Builds (train, test) for one contamination scenario. The train set is
// contaminated; the test set is clean signal, projected through D'' in the
// domain-shift scenario and through D otherwise.
ScenarioData build_scenario(const SubspaceSpec& spec, const ScenarioParams& params);

// Scales every entry in place.
void scale(Matrix& m, double factor);

}  // namespace descentlab::datagen
