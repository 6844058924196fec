#include "descentlab/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "descentlab/rng.hpp"

namespace descentlab::datagen {

namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("probability must lie in [0, 1], got " + std::to_string(p));
  }
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng rng) {
  Matrix m(rows, cols);
  double* p = m.data();
  for (std::size_t i = 0; i < rows * cols; ++i) p[i] = rng.next_normal();
  return m;
}

// First k entries of a seeded Fisher-Yates pass over 0..n-1.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.next_below(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace

void validate(const SubspaceSpec& spec) {
  if (spec.latent_dim == 0) throw std::invalid_argument("latent_dim must be positive");
  if (spec.ambient_dim <= spec.latent_dim) {
    throw std::invalid_argument("ambient_dim must exceed latent_dim (under-complete embedding)");
  }
  if (spec.n_train == 0 || spec.n_test == 0) {
    throw std::invalid_argument("n_train and n_test must be at least 1");
  }
}

const char* to_string(SampleFlag flag) {
  switch (flag) {
    case SampleFlag::clean: return "clean";
    case SampleFlag::noisy: return "noisy";
    case SampleFlag::anomaly: return "anomaly";
  }
  return "unknown";
}

std::size_t Dataset::count_flag(SampleFlag f) const {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), f));
}

double db_to_linear(double snr_db) {
  if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_db must be finite");
  return std::pow(10.0, snr_db / 20.0);
}

double theta_sample_noise(double snr_db, std::size_t latent_dim) {
  if (latent_dim == 0) throw std::invalid_argument("latent_dim must be positive");
  return db_to_linear(snr_db) / std::sqrt(static_cast<double>(latent_dim));
}

double theta_feature_noise(double snr_db, std::size_t latent_dim, double probability) {
  if (latent_dim == 0) throw std::invalid_argument("latent_dim must be positive");
  if (!(probability > 0.0) || probability > 1.0) {
    throw std::invalid_argument("feature-noise probability must lie in (0, 1]");
  }
  return std::sqrt(probability / static_cast<double>(latent_dim)) * db_to_linear(snr_db);
}

double theta_shifted(double snr_db, std::size_t latent_dim, double shift_scale) {
  if (latent_dim == 0) throw std::invalid_argument("latent_dim must be positive");
  if (shift_scale < 0.0) throw std::invalid_argument("shift_scale must be nonnegative");
  return db_to_linear(snr_db) /
         std::sqrt((shift_scale * shift_scale + 1.0) * static_cast<double>(latent_dim));
}

NoiseSpec make_sample_noise_spec(double probability, double snr_db, std::size_t latent_dim) {
  check_probability(probability);
  NoiseSpec spec;
  spec.mode = NoiseMode::sample;
  spec.probability = probability;
  spec.snr_db = snr_db;
  spec.linear_snr = db_to_linear(snr_db);
  spec.theta = theta_sample_noise(snr_db, latent_dim);
  return spec;
}

NoiseSpec make_feature_noise_spec(double probability, double snr_db, std::size_t latent_dim) {
  check_probability(probability);
  NoiseSpec spec;
  spec.mode = NoiseMode::feature;
  spec.probability = probability;
  spec.snr_db = snr_db;
  spec.linear_snr = db_to_linear(snr_db);
  spec.theta = probability > 0.0 ? theta_feature_noise(snr_db, latent_dim, probability) : 0.0;
  return spec;
}

AnomalySpec make_anomaly_spec(double probability, double sar_db, std::size_t latent_dim) {
  check_probability(probability);
  AnomalySpec spec;
  spec.probability = probability;
  spec.sar_db = sar_db;
  spec.theta = theta_sample_noise(sar_db, latent_dim);
  return spec;
}

Matrix sample_latents(const SubspaceSpec& spec, std::uint64_t stream) {
  validate(spec);
  const std::size_t n = stream == streams::latents_test ? spec.n_test : spec.n_train;
  return gaussian_matrix(n, spec.latent_dim, Rng::substream(spec.seed, stream));
}

ProjectionMatrix sample_projection(const SubspaceSpec& spec, std::uint64_t seed_offset) {
  validate(spec);
  ProjectionMatrix proj;
  proj.entries = gaussian_matrix(spec.ambient_dim, spec.latent_dim,
                                 Rng::substream(spec.seed, streams::projection + seed_offset));
  proj.kind = ProjectionKind::base;
  return proj;
}

ProjectionMatrix make_shifted_projection(const ProjectionMatrix& base, double shift_scale,
                                         std::uint64_t seed) {
  if (base.kind != ProjectionKind::base) {
    throw std::invalid_argument("make_shifted_projection expects a base projection");
  }
  if (shift_scale < 0.0) throw std::invalid_argument("shift_scale must be nonnegative");
  const Matrix perturbation =
      gaussian_matrix(base.entries.rows(), base.entries.cols(),
                      Rng::substream(seed, streams::projection_shift));
  const double norm = std::sqrt(1.0 + shift_scale * shift_scale);
  ProjectionMatrix shifted;
  shifted.entries = Matrix(base.entries.rows(), base.entries.cols());
  for (std::size_t i = 0; i < base.entries.size(); ++i) {
    shifted.entries.data()[i] =
        (base.entries.data()[i] + shift_scale * perturbation.data()[i]) / norm;
  }
  shifted.kind = ProjectionKind::shifted;
  shifted.shift_scale = shift_scale;
  return shifted;
}

Dataset apply_sample_noise(const Dataset& clean, const NoiseSpec& noise, std::uint64_t seed) {
  if (noise.mode != NoiseMode::sample) {
    throw std::invalid_argument("apply_sample_noise requires a sample-mode NoiseSpec");
  }
  check_probability(noise.probability);
  Dataset out = clean;
  Rng rng = Rng::substream(seed, streams::sample_noise);
  const std::size_t n = out.n_features();
  for (std::size_t i = 0; i < out.n_samples(); ++i) {
    if (!rng.next_bernoulli(noise.probability)) continue;
    double* row = out.samples.row(i);
    for (std::size_t j = 0; j < n; ++j) row[j] += rng.next_normal();
    out.flags[i] = SampleFlag::noisy;
  }
  return out;
}

Dataset apply_feature_noise(const Dataset& clean, const NoiseSpec& noise, std::uint64_t seed) {
  if (noise.mode != NoiseMode::feature) {
    throw std::invalid_argument("apply_feature_noise requires a feature-mode NoiseSpec");
  }
  check_probability(noise.probability);
  Dataset out = clean;
  const std::size_t n = out.n_features();
  const std::size_t n_noisy =
      static_cast<std::size_t>(std::floor(static_cast<double>(n) * noise.probability));
  std::vector<std::uint8_t> mask(n, 0);
  Rng mask_rng = Rng::substream(seed, streams::feature_mask);
  for (std::size_t idx : sample_without_replacement(n, n_noisy, mask_rng)) mask[idx] = 1;
  out.noisy_feature_mask = mask;
  if (n_noisy == 0) return out;

  Rng rng = Rng::substream(seed, streams::feature_noise);
  for (std::size_t i = 0; i < out.n_samples(); ++i) {
    double* row = out.samples.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (mask[j]) row[j] += rng.next_normal();
    }
    out.flags[i] = SampleFlag::noisy;
  }
  return out;
}

Dataset inject_anomalies(const Dataset& clean, const AnomalySpec& spec, std::uint64_t seed) {
  check_probability(spec.probability);
  Dataset out = clean;
  const std::size_t n_rows = out.n_samples();
  const std::size_t n_anomalies =
      static_cast<std::size_t>(std::floor(static_cast<double>(n_rows) * spec.probability));
  Rng row_rng = Rng::substream(seed, streams::anomaly_rows);
  std::vector<std::size_t> rows = sample_without_replacement(n_rows, n_anomalies, row_rng);
  std::sort(rows.begin(), rows.end());
  Rng value_rng = Rng::substream(seed, streams::anomaly_values);
  const std::size_t n = out.n_features();
  for (std::size_t r : rows) {
    double* row = out.samples.row(r);
    for (std::size_t j = 0; j < n; ++j) row[j] = value_rng.next_normal();
    out.flags[r] = SampleFlag::anomaly;
  }
  return out;
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "sample-noise") return Scenario::sample_noise;
  if (name == "feature-noise") return Scenario::feature_noise;
  if (name == "domain-shift") return Scenario::domain_shift;
  if (name == "anomaly") return Scenario::anomaly;
  throw std::invalid_argument("unknown scenario '" + name +
                              "' (expected sample-noise, feature-noise, domain-shift or anomaly)");
}

const char* to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::sample_noise: return "sample-noise";
    case Scenario::feature_noise: return "feature-noise";
    case Scenario::domain_shift: return "domain-shift";
    case Scenario::anomaly: return "anomaly";
  }
  return "unknown";
}

void scale(Matrix& m, double factor) {
  for (double& x : m.storage()) x *= factor;
}

namespace {

Dataset project_clean(const Matrix& latents, const ProjectionMatrix& proj, double theta) {
  Dataset ds;
  matmul_nt(latents, proj.entries, ds.samples);
  scale(ds.samples, theta);
  ds.flags.assign(ds.samples.rows(), SampleFlag::clean);
  ds.batch_labels.assign(ds.samples.rows(), 0);
  return ds;
}

}  // namespace

ScenarioData build_scenario(const SubspaceSpec& spec, const ScenarioParams& params) {
  validate(spec);
  const Matrix z_train = sample_latents(spec, streams::latents_train);
  const Matrix z_test = sample_latents(spec, streams::latents_test);
  ScenarioData data;
  data.projection = sample_projection(spec);

  switch (params.scenario) {
    case Scenario::sample_noise: {
      const NoiseSpec noise =
          make_sample_noise_spec(params.probability, params.snr_db, spec.latent_dim);
      data.theta = noise.theta;
      data.train = apply_sample_noise(project_clean(z_train, data.projection, noise.theta),
                                      noise, spec.seed);
      data.test = project_clean(z_test, data.projection, noise.theta);
      break;
    }
    case Scenario::feature_noise: {
      const NoiseSpec noise =
          make_feature_noise_spec(params.probability, params.snr_db, spec.latent_dim);
      data.theta = noise.theta;
      data.train = apply_feature_noise(project_clean(z_train, data.projection, noise.theta),
                                       noise, spec.seed);
      data.test = project_clean(z_test, data.projection, noise.theta);
      break;
    }
    case Scenario::domain_shift: {
      // Clean source/target carry no theta; the normalized D'' keeps unit
      // entry variance so source and target norms match. Optional sample
      // noise (train only) models the noisy-shift variant.
      data.theta = 1.0;
      data.test_projection =
          make_shifted_projection(data.projection, params.shift_scale, spec.seed);
      data.train = project_clean(z_train, data.projection, 1.0);
      data.test = project_clean(z_test, *data.test_projection, 1.0);
      if (params.shift_noise_p > 0.0) {
        const NoiseSpec noise = make_sample_noise_spec(params.shift_noise_p,
                                                       params.shift_noise_snr_db, spec.latent_dim);
        data.theta = noise.theta;
        scale(data.train.samples, noise.theta);
        scale(data.test.samples, noise.theta);
        data.train = apply_sample_noise(data.train, noise, spec.seed);
      }
      break;
    }
    case Scenario::anomaly: {
      const AnomalySpec anomaly =
          make_anomaly_spec(params.probability, params.sar_db, spec.latent_dim);
      data.theta = anomaly.theta;
      data.train = inject_anomalies(project_clean(z_train, data.projection, anomaly.theta),
                                    anomaly, spec.seed);
      data.test = project_clean(z_test, data.projection, anomaly.theta);
      break;
    }
  }
  return data;
}

}  // namespace descentlab::datagen
