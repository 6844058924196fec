#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <limits>

#include "descentlab/datagen.hpp"
#include "descentlab/rng.hpp"
#include "oracles.hpp"

using namespace descentlab;
using namespace descentlab::datagen;

namespace {

double entry_variance(const Matrix& m) {
  double mean = 0.0;
  for (double x : m.storage()) mean += x;
  mean /= static_cast<double>(m.size());
  double var = 0.0;
  for (double x : m.storage()) var += (x - mean) * (x - mean);
  return var / static_cast<double>(m.size());
}

}  // namespace

TEST_SUITE("datagen") {

TEST_CASE("db_to_linear known values") {
  CHECK(db_to_linear(0.0) == doctest::Approx(1.0));
  CHECK(db_to_linear(-20.0) == doctest::Approx(0.1));
  CHECK(db_to_linear(20.0) == doctest::Approx(10.0));
  CHECK(db_to_linear(-10.0) < db_to_linear(-5.0));  // monotone
  CHECK_THROWS_AS(db_to_linear(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
  CHECK_THROWS_AS(db_to_linear(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST_CASE("theta_sample_noise closed form") {
  CHECK(theta_sample_noise(0.0, 1) == doctest::Approx(1.0));
  CHECK(theta_sample_noise(0.0, 4) == doctest::Approx(0.5));
  CHECK(theta_sample_noise(-15.0, 20) == doctest::Approx(0.03976353643835254).epsilon(1e-12));
  CHECK_THROWS_AS(theta_sample_noise(0.0, 0), std::invalid_argument);
}

TEST_CASE("theta_sample_noise energy ratio (Monte-Carlo oracle)") {
  const double theta = theta_sample_noise(-15.0, 20);
  const double ratio = oracles::mc_sample_noise_ratio(theta, 20, 100000, 77);
  const double target = std::pow(db_to_linear(-15.0), 2);
  CHECK(ratio == doctest::Approx(target).epsilon(0.02));
}

TEST_CASE("theta_feature_noise closed form and p=1 consistency") {
  CHECK(theta_feature_noise(0.0, 4, 0.25) == doctest::Approx(0.25));
  CHECK(theta_feature_noise(-7.0, 20, 1.0) == doctest::Approx(theta_sample_noise(-7.0, 20)));
  CHECK(theta_feature_noise(-13.0, 20, 0.4) == doctest::Approx(0.03166029796534683).epsilon(1e-12));
  CHECK_THROWS_AS(theta_feature_noise(0.0, 20, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(theta_feature_noise(0.0, 20, -0.1), std::invalid_argument);
}

TEST_CASE("theta_feature_noise energy ratio (Monte-Carlo oracle)") {
  // n*p integral so the floor in the active-entry count is exact.
  const double theta = theta_feature_noise(-13.0, 20, 0.4);
  const double ratio = oracles::mc_feature_noise_ratio(theta, 20, 50, 0.4, 100000, 78);
  const double target = std::pow(db_to_linear(-13.0), 2);
  CHECK(ratio == doctest::Approx(target).epsilon(0.02));
}

TEST_CASE("theta_shifted closed form") {
  CHECK(theta_shifted(0.0, 1, 0.0) == doctest::Approx(1.0));
  CHECK(theta_shifted(0.0, 3, 1.0) == doctest::Approx(0.4082482904638631));
  CHECK(theta_shifted(-15.0, 20, 2.0) == doctest::Approx(0.01778279410038923).epsilon(1e-12));
  CHECK(theta_shifted(-7.0, 20, 0.0) == doctest::Approx(theta_sample_noise(-7.0, 20)));
  CHECK_THROWS_AS(theta_shifted(0.0, 20, -1.0), std::invalid_argument);
}

TEST_CASE("theta_shifted energy ratio (Monte-Carlo oracle)") {
  const double theta = theta_shifted(-15.0, 20, 2.0);
  const double ratio = oracles::mc_shifted_ratio(theta, 20, 2.0, 100000, 79);
  const double target = std::pow(db_to_linear(-15.0), 2);
  CHECK(ratio == doctest::Approx(target).epsilon(0.02));
}

TEST_CASE("sample_latents is deterministic and standard normal") {
  SubspaceSpec spec;
  spec.latent_dim = 20;
  spec.ambient_dim = 50;
  spec.n_train = 100000;
  spec.n_test = 10;
  spec.seed = 5;
  const Matrix a = sample_latents(spec, streams::latents_train);
  const Matrix b = sample_latents(spec, streams::latents_train);
  CHECK(a == b);
  for (std::size_t c = 0; c < spec.latent_dim; ++c) {
    double mean = 0.0, sq = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) {
      mean += a(r, c);
      sq += a(r, c) * a(r, c);
    }
    mean /= static_cast<double>(a.rows());
    const double var = sq / static_cast<double>(a.rows()) - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);
  }
}

TEST_CASE("spec validation rejects degenerate sizes") {
  SubspaceSpec spec;
  spec.n_train = 0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.n_train = 10;
  spec.latent_dim = 50;
  spec.ambient_dim = 50;  // must be strictly larger
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
}

TEST_CASE("sample_projection entry variance concentrates near 1") {
  SubspaceSpec spec;
  spec.latent_dim = 50;
  spec.ambient_dim = 100;  // 5000 entries
  spec.n_train = 1;
  spec.n_test = 1;
  spec.seed = 9;
  const ProjectionMatrix proj = sample_projection(spec);
  CHECK(proj.kind == ProjectionKind::base);
  REQUIRE(proj.entries.rows() == 100);
  REQUIRE(proj.entries.cols() == 50);
  const double var = entry_variance(proj.entries);
  CHECK(var > 0.92);
  CHECK(var < 1.08);
  CHECK(sample_projection(spec).entries == proj.entries);  // deterministic
}

TEST_CASE("make_shifted_projection: s=0 returns the base entries") {
  SubspaceSpec spec;
  spec.latent_dim = 20;
  spec.ambient_dim = 50;
  spec.seed = 4;
  const ProjectionMatrix base = sample_projection(spec);
  const ProjectionMatrix shifted = make_shifted_projection(base, 0.0, 4);
  CHECK(shifted.entries == base.entries);
  CHECK(shifted.kind == ProjectionKind::shifted);
}

TEST_CASE("make_shifted_projection keeps unit variance and expected correlation") {
  SubspaceSpec spec;
  spec.latent_dim = 50;
  spec.ambient_dim = 100;
  spec.seed = 12;
  const ProjectionMatrix base = sample_projection(spec);
  const ProjectionMatrix s3 = make_shifted_projection(base, 3.0, 12);
  const double var = entry_variance(s3.entries);
  CHECK(var > 0.92);
  CHECK(var < 1.08);

  // corr(D, D'') = 1/sqrt(1+s^2); s=1 gives ~0.7071
  const ProjectionMatrix s1 = make_shifted_projection(base, 1.0, 12);
  double sum_ab = 0.0, sum_a = 0.0, sum_b = 0.0, sum_a2 = 0.0, sum_b2 = 0.0;
  const double n = static_cast<double>(base.entries.size());
  for (std::size_t i = 0; i < base.entries.size(); ++i) {
    const double a = base.entries.data()[i];
    const double b = s1.entries.data()[i];
    sum_ab += a * b;
    sum_a += a;
    sum_b += b;
    sum_a2 += a * a;
    sum_b2 += b * b;
  }
  const double cov = sum_ab / n - (sum_a / n) * (sum_b / n);
  const double corr = cov / std::sqrt((sum_a2 / n - (sum_a / n) * (sum_a / n)) *
                                      (sum_b2 / n - (sum_b / n) * (sum_b / n)));
  CHECK(corr == doctest::Approx(0.7071067811865475).epsilon(0.045));

  CHECK_THROWS_AS(make_shifted_projection(base, -1.0, 12), std::invalid_argument);
  CHECK_THROWS_AS(make_shifted_projection(s1, 1.0, 12), std::invalid_argument);
}

namespace {

Dataset make_clean(std::size_t rows, std::size_t cols, std::uint64_t seed, double theta = 1.0) {
  SubspaceSpec spec;
  spec.latent_dim = 20;
  spec.ambient_dim = cols;
  spec.n_train = rows;
  spec.n_test = 1;
  spec.seed = seed;
  const Matrix z = sample_latents(spec, streams::latents_train);
  const ProjectionMatrix proj = sample_projection(spec);
  Dataset ds;
  matmul_nt(z, proj.entries, ds.samples);
  scale(ds.samples, theta);
  ds.flags.assign(rows, SampleFlag::clean);
  ds.batch_labels.assign(rows, 0);
  return ds;
}

}  // namespace

TEST_CASE("apply_sample_noise respects p=0, p=1 and binomial counts") {
  const Dataset clean = make_clean(5000, 50, 21);

  const Dataset untouched = apply_sample_noise(clean, make_sample_noise_spec(0.0, -15.0, 20), 21);
  CHECK(untouched.samples == clean.samples);
  CHECK(untouched.count_flag(SampleFlag::noisy) == 0);

  const Dataset all = apply_sample_noise(clean, make_sample_noise_spec(1.0, -15.0, 20), 21);
  CHECK(all.count_flag(SampleFlag::noisy) == 5000);

  const Dataset most = apply_sample_noise(clean, make_sample_noise_spec(0.9, -15.0, 20), 21);
  const std::size_t noisy = most.count_flag(SampleFlag::noisy);
  CHECK(noisy >= 4400);  // binomial(5000, 0.9) 99.99% interval
  CHECK(noisy <= 4600);
}

TEST_CASE("apply_feature_noise masks exactly floor(n*p) columns on every row") {
  const double theta = 0.5;
  const Dataset clean = make_clean(20000, 50, 22, theta);

  const Dataset none = apply_feature_noise(clean, make_feature_noise_spec(0.0, -13.0, 20), 22);
  CHECK(none.samples == clean.samples);
  REQUIRE(none.noisy_feature_mask.has_value());
  for (const auto m : *none.noisy_feature_mask) CHECK(m == 0);

  const Dataset noised = apply_feature_noise(clean, make_feature_noise_spec(0.5, -13.0, 20), 22);
  REQUIRE(noised.noisy_feature_mask.has_value());
  std::size_t masked = 0;
  for (const auto m : *noised.noisy_feature_mask) masked += m;
  CHECK(masked == 25);

  // Column variance rises by the unit noise variance exactly on masked
  // columns; mask constancy across rows follows from the column pattern.
  for (std::size_t c = 0; c < 50; ++c) {
    double clean_mean = 0.0, noised_mean = 0.0;
    for (std::size_t r = 0; r < clean.n_samples(); ++r) {
      clean_mean += clean.samples(r, c);
      noised_mean += noised.samples(r, c);
    }
    clean_mean /= static_cast<double>(clean.n_samples());
    noised_mean /= static_cast<double>(clean.n_samples());
    double clean_var = 0.0, noised_var = 0.0;
    for (std::size_t r = 0; r < clean.n_samples(); ++r) {
      clean_var += (clean.samples(r, c) - clean_mean) * (clean.samples(r, c) - clean_mean);
      noised_var += (noised.samples(r, c) - noised_mean) * (noised.samples(r, c) - noised_mean);
    }
    clean_var /= static_cast<double>(clean.n_samples());
    noised_var /= static_cast<double>(clean.n_samples());
    const double diff = noised_var - clean_var;
    if ((*noised.noisy_feature_mask)[c]) {
      CHECK(diff > 0.85);
      CHECK(diff < 1.15);
    } else {
      CHECK(std::abs(diff) < 0.1);
    }
  }
}

TEST_CASE("inject_anomalies replaces an exact subset") {
  const Dataset clean = make_clean(1000, 50, 23, 0.1);
  const Dataset none = inject_anomalies(clean, make_anomaly_spec(0.0, -15.0, 20), 23);
  CHECK(none.samples == clean.samples);

  const Dataset with = inject_anomalies(clean, make_anomaly_spec(0.3, -15.0, 20), 23);
  CHECK(with.count_flag(SampleFlag::anomaly) == 300);
  CHECK(with.count_flag(SampleFlag::clean) == 700);

  // Untouched rows keep their exact values.
  for (std::size_t r = 0; r < with.n_samples(); ++r) {
    if (with.flags[r] == SampleFlag::clean) {
      CHECK(with.samples.row_span(r)[0] == clean.samples.row_span(r)[0]);
    }
  }
}

TEST_CASE("anomaly energy ratio matches SAR^2 over several realizations") {
  const double sar_db = -15.0;
  const double target = std::pow(db_to_linear(sar_db), 2);
  double ratio_sum = 0.0;
  const int n_realizations = 8;
  for (int s = 0; s < n_realizations; ++s) {
    const AnomalySpec spec = make_anomaly_spec(0.3, sar_db, 20);
    const Dataset clean = make_clean(20000, 50, 100 + static_cast<std::uint64_t>(s), spec.theta);
    const Dataset mixed = inject_anomalies(clean, spec, 100 + static_cast<std::uint64_t>(s));
    double clean_energy = 0.0, anomaly_energy = 0.0;
    std::size_t n_clean = 0, n_anomaly = 0;
    for (std::size_t r = 0; r < mixed.n_samples(); ++r) {
      double norm_sq = 0.0;
      for (double x : mixed.samples.row_span(r)) norm_sq += x * x;
      if (mixed.flags[r] == SampleFlag::anomaly) {
        anomaly_energy += norm_sq;
        ++n_anomaly;
      } else {
        clean_energy += norm_sq;
        ++n_clean;
      }
    }
    ratio_sum += (clean_energy / static_cast<double>(n_clean)) /
                 (anomaly_energy / static_cast<double>(n_anomaly));
  }
  CHECK(ratio_sum / n_realizations == doctest::Approx(target).epsilon(0.05));
}

TEST_CASE("build_scenario sample-noise with p=0 equals clean theta-scaled projections") {
  SubspaceSpec spec;
  spec.latent_dim = 20;
  spec.ambient_dim = 50;
  spec.n_train = 200;
  spec.n_test = 100;
  spec.seed = 31;
  ScenarioParams params;
  params.scenario = Scenario::sample_noise;
  params.probability = 0.0;
  params.snr_db = -15.0;
  const ScenarioData data = build_scenario(spec, params);

  Matrix expected;
  matmul_nt(sample_latents(spec, streams::latents_train), data.projection.entries, expected);
  scale(expected, theta_sample_noise(-15.0, 20));
  CHECK(data.train.samples == expected);
  CHECK(data.train.count_flag(SampleFlag::clean) == 200);
  CHECK(data.test.n_samples() == 100);
}

TEST_CASE("build_scenario domain-shift with s=0 projects test through D") {
  SubspaceSpec spec;
  spec.latent_dim = 20;
  spec.ambient_dim = 50;
  spec.n_train = 50;
  spec.n_test = 60;
  spec.seed = 32;
  ScenarioParams params;
  params.scenario = Scenario::domain_shift;
  params.shift_scale = 0.0;
  const ScenarioData data = build_scenario(spec, params);
  REQUIRE(data.test_projection.has_value());
  CHECK(data.test_projection->entries == data.projection.entries);
  CHECK(data.theta == 1.0);
}

TEST_CASE("build_scenario is a pure function of spec and seed") {
  SubspaceSpec spec;
  spec.latent_dim = 20;
  spec.ambient_dim = 50;
  spec.n_train = 300;
  spec.n_test = 100;
  spec.seed = 33;
  ScenarioParams params;
  params.scenario = Scenario::anomaly;
  params.probability = 0.3;
  params.sar_db = -15.0;
  const ScenarioData a = build_scenario(spec, params);
  const ScenarioData b = build_scenario(spec, params);
  CHECK(a.train.samples == b.train.samples);
  CHECK(a.test.samples == b.test.samples);
  CHECK(a.train.flags == b.train.flags);
}

TEST_CASE("paper defaults are 5000 train and 10000 test samples") {
  const SubspaceSpec spec;
  CHECK(spec.n_train == 5000);
  CHECK(spec.n_test == 10000);
  CHECK(spec.latent_dim == 20);
  CHECK(spec.ambient_dim == 50);
}

TEST_CASE("unknown scenario name is rejected") {
  CHECK_THROWS_AS(scenario_from_string("label-noise"), std::invalid_argument);
  CHECK(scenario_from_string("domain-shift") == Scenario::domain_shift);
}

}  // TEST_SUITE
