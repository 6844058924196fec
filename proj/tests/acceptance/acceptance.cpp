// Acceptance suite: one checkable criterion per function, one PASS/FAIL line
// per criterion on stdout. Run with a criterion number (1-10) or no
// arguments for the full suite.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "descentlab/autoencoder.hpp"
#include "descentlab/csv.hpp"
#include "descentlab/datagen.hpp"
#include "descentlab/metrics.hpp"
#include "descentlab/rng.hpp"
#include "descentlab/sweep.hpp"

using namespace descentlab;

namespace {

// ---------------------------------------------------------------------------
// Shared experiment constants (hyperparameter table, desk profile)
// ---------------------------------------------------------------------------
constexpr std::size_t kLatentDim = 20;
constexpr std::size_t kAmbientDim = 50;
constexpr std::size_t kBottleneck = 25;
constexpr std::size_t kTrainRows = 2000;
constexpr std::size_t kTestRows = 2000;
constexpr std::size_t kEpochs = 100;
constexpr std::size_t kBatchSize = 10;
constexpr double kLearningRate = 0.001;
const std::vector<std::uint64_t> kSeeds = {1, 2, 3};

// Fixed model sizes for the epoch-wise and sample-wise criteria, chosen near
// the interpolation threshold observed in the model-wise scan.
constexpr std::size_t kEpochWiseHidden = 100;
constexpr std::size_t kEpochWiseEpochs = 600;
constexpr std::size_t kSampleWiseHidden = 52;
constexpr std::size_t kDomainShiftHidden = 200;

struct Outcome {
  bool passed = false;
  std::string detail;
};

sweep::SweepSpec base_spec() {
  sweep::SweepSpec spec;
  spec.data.latent_dim = kLatentDim;
  spec.data.ambient_dim = kAmbientDim;
  spec.data.n_train = kTrainRows;
  spec.data.n_test = kTestRows;
  spec.base_arch.input_dim = kAmbientDim;
  spec.base_arch.bottleneck_dim = kBottleneck;
  spec.base_arch.activation = nn::Activation::relu;
  spec.train.learning_rate = kLearningRate;
  spec.train.epochs = kEpochs;
  spec.train.batch_size = kBatchSize;
  spec.train.eval_period = kEpochs;
  spec.seeds = kSeeds;
  return spec;
}

std::vector<double> curve_x(const sweep::CurveTable& curve) {
  std::vector<double> x;
  for (const auto& row : curve.rows) x.push_back(row.x);
  return x;
}

std::vector<double> curve_test(const sweep::CurveTable& curve) {
  std::vector<double> y;
  for (const auto& row : curve.rows) y.push_back(row.mean_test);
  return y;
}

std::vector<double> curve_train(const sweep::CurveTable& curve) {
  std::vector<double> y;
  for (const auto& row : curve.rows) y.push_back(row.mean_train);
  return y;
}

// ---------------------------------------------------------------------------
// Criterion 1: Monte-Carlo SNR calibration of the theta closed forms
// ---------------------------------------------------------------------------
Outcome criterion_snr_calibration() {
  const std::vector<double> snr_grid = {-20.0, -15.0, -10.0, -5.0, 0.0};
  const std::vector<std::size_t> dims = {4, 20, 64};
  const std::size_t draws = 100000;
  double worst = 0.0;
  std::string worst_at;
  for (std::size_t d : dims) {
    // E[(row.z)^2] / E[eps^2] estimated with an independent stdlib RNG; the
    // ambient dimension cancels between signal and noise energies.
    std::mt19937_64 gen(2024 + d);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> z(d);
    double signal = 0.0, noise = 0.0;
    for (std::size_t it = 0; it < draws; ++it) {
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) z[i] = normal(gen);
      for (std::size_t i = 0; i < d; ++i) dot += normal(gen) * z[i];
      signal += dot * dot;
      const double e = normal(gen);
      noise += e * e;
    }
    const double base_ratio = signal / noise;  // ~ d
    for (double snr_db : snr_grid) {
      const double theta = datagen::theta_sample_noise(snr_db, d);
      const double estimated_db = 20.0 * std::log10(theta * std::sqrt(base_ratio));
      const double err = std::abs(estimated_db - snr_db);
      if (err > worst) {
        worst = err;
        worst_at = "snr=" + std::to_string(snr_db) + " d=" + std::to_string(d);
      }
    }
  }
  Outcome outcome;
  outcome.passed = worst <= 0.5;
  std::ostringstream detail;
  detail << "max |error| " << worst << " dB at " << worst_at << " (tolerance 0.5 dB)";
  outcome.detail = detail.str();
  return outcome;
}

// ---------------------------------------------------------------------------
// Criterion 2: finite-difference gradient oracle
// ---------------------------------------------------------------------------
double fd_worst_error(nn::AutoencoderModel& model, const Matrix& batch, std::size_t n_params,
                      std::uint64_t seed) {
  nn::ForwardCache cache;
  nn::forward(model, batch, &cache);
  const nn::Gradients grads = nn::backward(model, cache, batch);
  std::vector<std::vector<double>*> params = {&model.w1.storage(), &model.b1,
                                              &model.w2.storage(), &model.b2,
                                              &model.w3.storage(), &model.b3,
                                              &model.w4.storage(), &model.b4};
  std::vector<const std::vector<double>*> views = {&grads.w1.storage(), &grads.b1,
                                                   &grads.w2.storage(), &grads.b2,
                                                   &grads.w3.storage(), &grads.b3,
                                                   &grads.w4.storage(), &grads.b4};
  Rng rng(seed);
  const double step = 1e-5;
  const double mid = nn::mse(nn::forward(model, batch), batch);
  double worst = 0.0;
  std::size_t accepted = 0, attempts = 0;
  while (accepted < n_params && attempts < 50 * n_params) {
    ++attempts;
    const std::size_t a = rng.next_below(params.size());
    auto& array = *params[a];
    const std::size_t i = rng.next_below(array.size());
    const double original = array[i];
    array[i] = original + step;
    const double up = nn::mse(nn::forward(model, batch), batch);
    array[i] = original - step;
    const double down = nn::mse(nn::forward(model, batch), batch);
    array[i] = original;
    // Central differences are only valid at differentiable points; a relu
    // kink inside the probed interval makes the one-sided slopes disagree,
    // so such parameters are resampled. A wrong gradient still fails: there
    // the one-sided slopes agree with each other, not with the analytic one.
    const double left = (mid - down) / step;
    const double right = (up - mid) / step;
    if (std::abs(left - right) > 1e-2 * std::max({std::abs(left), std::abs(right), 1.0})) {
      continue;
    }
    const double fd = (up - down) / (2.0 * step);
    const double analytic = (*views[a])[i];
    worst = std::max(worst, std::abs(fd - analytic) /
                                std::max({std::abs(fd), std::abs(analytic), 1e-8}));
    ++accepted;
  }
  return worst;
}

Outcome criterion_gradient_oracle() {
  struct Arch {
    std::size_t n, h, b;
    nn::Activation act;
  };
  const Arch archs[] = {{6, 3, 2, nn::Activation::tanh},
                        {9, 6, 4, nn::Activation::tanh},
                        {7, 8, 3, nn::Activation::tanh},
                        {6, 3, 2, nn::Activation::relu},
                        {10, 5, 6, nn::Activation::relu}};
  double worst = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    nn::AutoencoderModel model =
        nn::init_model({archs[i].n, archs[i].h, archs[i].b, archs[i].act}, 60 + i);
    Matrix batch(6, archs[i].n);
    Rng rng(70 + i);
    for (double& x : batch.storage()) x = rng.next_normal();
    worst = std::max(worst, fd_worst_error(model, batch, 20, 80 + i));
  }
  Outcome outcome;
  outcome.passed = worst < 1e-4;
  std::ostringstream detail;
  detail << "max relative error " << worst << " over 5 architectures x 20 parameters"
         << " (tolerance 1e-4)";
  outcome.detail = detail.str();
  return outcome;
}

// ---------------------------------------------------------------------------
// Criterion 3: metric oracles (ROC-AUC, KNN-DAT)
// ---------------------------------------------------------------------------
double brute_force_auc(const std::vector<metrics::ScoredSample>& scored) {
  std::uint64_t numerator2 = 0, n_pos = 0, n_neg = 0;
  for (const auto& a : scored) {
    if (!a.is_anomaly) {
      ++n_neg;
      continue;
    }
    ++n_pos;
    for (const auto& b : scored) {
      if (b.is_anomaly) continue;
      if (a.score > b.score) numerator2 += 2;
      else if (a.score == b.score) numerator2 += 1;
    }
  }
  return static_cast<double>(numerator2) / (2.0 * static_cast<double>(n_pos * n_neg));
}

double brute_force_knn(const Matrix& emb, const std::vector<int>& batches, std::size_t k) {
  const std::size_t m = emb.rows();
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      double d2 = 0.0;
      for (std::size_t t = 0; t < emb.cols(); ++t) {
        const double diff = emb(i, t) - emb(j, t);
        d2 += diff * diff;
      }
      dist.emplace_back(d2, j);
    }
    std::sort(dist.begin(), dist.end());
    std::size_t same = 0;
    for (std::size_t t = 0; t < k; ++t) same += batches[dist[t].second] == batches[i] ? 1 : 0;
    total += static_cast<double>(same) / static_cast<double>(k);
  }
  return total / static_cast<double>(m);
}

Outcome criterion_metric_oracles() {
  Rng rng(90);
  std::size_t auc_mismatches = 0;
  for (int instance = 0; instance < 200; ++instance) {
    const std::size_t n = 2 + rng.next_below(48);
    std::vector<metrics::ScoredSample> scored;
    for (std::size_t i = 0; i < n; ++i) {
      scored.push_back({static_cast<double>(rng.next_below(10)) / 5.0, rng.next_bernoulli(0.4)});
    }
    scored[0].is_anomaly = true;
    scored[scored.size() - 1].is_anomaly = false;
    if (metrics::roc_auc(scored) != brute_force_auc(scored)) ++auc_mismatches;
  }

  std::size_t knn_mismatches = 0;
  for (int instance = 0; instance < 50; ++instance) {
    const std::size_t m = 20 + rng.next_below(181);  // up to 200
    const std::size_t dim = 1 + rng.next_below(6);
    Matrix emb(m, dim);
    std::vector<int> batches(m);
    for (std::size_t i = 0; i < m; ++i) {
      batches[i] = static_cast<int>(rng.next_below(3));
      for (std::size_t j = 0; j < dim; ++j) emb(i, j) = rng.next_normal();
    }
    const std::size_t k = 1 + rng.next_below(std::min<std::size_t>(m - 1, 15));
    if (metrics::knn_dat(emb, batches, {k, 1}) != brute_force_knn(emb, batches, k)) {
      ++knn_mismatches;
    }
  }

  // two identical 500-point batches in 5 dims, k=10, over 20 seeds
  double mixed_sum = 0.0;
  for (int s = 0; s < 20; ++s) {
    Matrix emb(1000, 5);
    Rng seed_rng(1000 + static_cast<std::uint64_t>(s));
    for (double& x : emb.storage()) x = seed_rng.next_normal();
    std::vector<int> batches(1000);
    for (std::size_t i = 0; i < 1000; ++i) batches[i] = i < 500 ? 0 : 1;
    mixed_sum += metrics::knn_dat(emb, batches, {10, 0});
  }
  const double mixed_mean = mixed_sum / 20.0;

  Outcome outcome;
  outcome.passed =
      auc_mismatches == 0 && knn_mismatches == 0 && std::abs(mixed_mean - 0.50) <= 0.02;
  std::ostringstream detail;
  detail << "roc_auc mismatches " << auc_mismatches << "/200, knn_dat mismatches "
         << knn_mismatches << "/50, mixed-batch mean " << mixed_mean << " (target 0.50 +/- 0.02)";
  outcome.detail = detail.str();
  return outcome;
}

// ---------------------------------------------------------------------------
// Criterion 4: loss normalization
// ---------------------------------------------------------------------------
Outcome criterion_normalization() {
  Rng rng(95);
  Matrix data(40, 7);
  for (double& x : data.storage()) x = 3.0 * rng.next_normal() + 1.5;
  const metrics::LossNormalizer norm = metrics::make_loss_normalizer(data);

  Matrix mean_pred(40, 7, norm.mean);
  const double mean_loss = metrics::normalized_loss(nn::mse(mean_pred, data), norm);

  Matrix pred = data;
  for (double& x : pred.storage()) x += 0.25 * rng.next_normal();
  const double base = metrics::normalized_loss(nn::mse(pred, data), norm);
  double worst_scale_err = 0.0;
  for (double c : {0.1, 10.0}) {
    Matrix sdata = data, spred = pred;
    for (double& x : sdata.storage()) x *= c;
    for (double& x : spred.storage()) x *= c;
    const double scaled =
        metrics::normalized_loss(nn::mse(spred, sdata), metrics::make_loss_normalizer(sdata));
    worst_scale_err = std::max(worst_scale_err, std::abs(scaled - base) / base);
  }

  Outcome outcome;
  outcome.passed = std::abs(mean_loss - 1.0) <= 1e-9 && worst_scale_err <= 1e-9;
  std::ostringstream detail;
  detail << "mean-predictor loss " << mean_loss << " (|err| "
         << std::abs(mean_loss - 1.0) << "), scale-invariance error " << worst_scale_err
         << " (tolerance 1e-9)";
  outcome.detail = detail.str();
  return outcome;
}

// ---------------------------------------------------------------------------
// Criterion 5: model-wise double descent, sample noise p=0.9 at -15 dB
// ---------------------------------------------------------------------------
sweep::SweepSpec model_wise_spec() {
  sweep::SweepSpec spec = base_spec();
  spec.axis = sweep::Axis::hidden_dim;
  spec.axis_values = sweep::expand_range(4, 200, 8);
  spec.scenario.scenario = datagen::Scenario::sample_noise;
  spec.scenario.probability = 0.9;
  spec.scenario.snr_db = -15.0;
  return spec;
}

Outcome criterion_model_wise() {
  const sweep::SweepOutput output = sweep::run_model_wise(model_wise_spec());
  const metrics::PeakProfile profile =
      metrics::peak_profile(curve_x(output.curve), curve_test(output.curve));

  const std::vector<double> train = curve_train(output.curve);
  bool train_ok = true;
  double worst_jump = 0.0;
  for (std::size_t i = 1; i < train.size(); ++i) {
    const double jump = train[i] / train[i - 1];
    worst_jump = std::max(worst_jump, jump);
    if (jump > 1.10) train_ok = false;
  }

  const bool has_peak = profile.peak.has_value() && profile.first_min.has_value();
  const double peak_ratio = has_peak ? *profile.peak / *profile.first_min : 0.0;

  Outcome outcome;
  outcome.passed = profile.descent_count >= 2 && has_peak && peak_ratio >= 1.10 && train_ok;
  std::ostringstream detail;
  detail << "descents " << profile.descent_count << " (need >=2), peak/pre-peak-min "
         << peak_ratio << " (need >=1.10), train worst step ratio " << worst_jump
         << " (need <=1.10)";
  outcome.detail = detail.str();
  return outcome;
}

// ---------------------------------------------------------------------------
// Criterion 6: epoch-wise double descent at -2 dB
// ---------------------------------------------------------------------------
Outcome criterion_epoch_wise() {
  std::vector<double> final_losses;
  std::size_t best_descents = 0;
  for (double p : {0.5, 0.9}) {
    sweep::SweepSpec spec = base_spec();
    spec.axis = sweep::Axis::epochs;
    spec.base_arch.hidden_dim = kEpochWiseHidden;
    spec.train.epochs = kEpochWiseEpochs;
    spec.train.eval_period = 1;
    spec.scenario.scenario = datagen::Scenario::sample_noise;
    spec.scenario.probability = p;
    spec.scenario.snr_db = -2.0;
    const sweep::SweepOutput output = sweep::run_epoch_wise(spec);
    const metrics::PeakProfile profile =
        metrics::peak_profile(curve_x(output.curve), curve_test(output.curve));
    best_descents = std::max(best_descents, profile.descent_count);
    final_losses.push_back(output.curve.rows.back().mean_test);
  }

  Outcome outcome;
  const bool ordered = final_losses[1] > final_losses[0];
  outcome.passed = best_descents >= 2 && ordered;
  std::ostringstream detail;
  detail << "max epoch-curve descents " << best_descents << " (need >=2), final losses p=0.5: "
         << final_losses[0] << " vs p=0.9: " << final_losses[1] << " (need p=0.9 higher)";
  outcome.detail = detail.str();
  return outcome;
}

// ---------------------------------------------------------------------------
// Criterion 7: sample-wise non-monotonicity at p=0.7, -15 dB
// ---------------------------------------------------------------------------
Outcome criterion_sample_wise() {
  sweep::SweepSpec spec = base_spec();
  spec.axis = sweep::Axis::n_train;
  spec.axis_values = {250, 500, 750, 1000, 1500, 2000, 3000, 4000};
  spec.data.n_train = 4000;
  spec.base_arch.hidden_dim = kSampleWiseHidden;
  spec.scenario.scenario = datagen::Scenario::sample_noise;
  spec.scenario.probability = 0.7;
  spec.scenario.snr_db = -15.0;
  const sweep::SweepOutput output = sweep::run_sample_wise(spec);
  const metrics::PeakProfile profile =
      metrics::peak_profile(curve_x(output.curve), curve_test(output.curve));

  Outcome outcome;
  outcome.passed = profile.peak.has_value();
  std::ostringstream detail;
  detail << "interior local maximum " << (profile.peak ? "found" : "absent");
  if (profile.peak) detail << " (value " << *profile.peak << ")";
  outcome.detail = detail.str();
  return outcome;
}

// ---------------------------------------------------------------------------
// Criterion 8: domain-shift ordering at a fixed over-parameterized size
// ---------------------------------------------------------------------------
Outcome criterion_domain_shift() {
  const std::vector<double> shifts = {1.0, 2.0, 3.0, 4.0};
  std::vector<double> mean_losses(shifts.size(), 0.0);
  for (std::uint64_t seed : kSeeds) {
    // The source data does not depend on s, so train once per seed and
    // evaluate every shifted target.
    datagen::SubspaceSpec data;
    data.latent_dim = kLatentDim;
    data.ambient_dim = kAmbientDim;
    data.n_train = kTrainRows;
    data.n_test = kTestRows;
    data.seed = seed;
    datagen::ScenarioParams params;
    params.scenario = datagen::Scenario::domain_shift;
    params.shift_scale = shifts[0];
    const datagen::ScenarioData first = datagen::build_scenario(data, params);

    nn::AutoencoderModel model =
        nn::init_model({kAmbientDim, kDomainShiftHidden, kBottleneck, nn::Activation::relu}, seed);
    nn::TrainConfig cfg;
    cfg.learning_rate = kLearningRate;
    cfg.epochs = kEpochs;
    cfg.batch_size = kBatchSize;
    cfg.eval_period = kEpochs;
    cfg.seed = seed;
    nn::train(model, first.train.samples, first.test.samples, cfg);

    for (std::size_t si = 0; si < shifts.size(); ++si) {
      params.shift_scale = shifts[si];
      const datagen::ScenarioData scenario = datagen::build_scenario(data, params);
      const std::vector<bool> labels(scenario.test.n_samples(), false);
      const auto scored = metrics::reconstruction_scores(model, scenario.test.samples, labels);
      double raw = 0.0;
      for (const auto& s : scored) raw += s.score;
      raw /= static_cast<double>(scored.size());
      const double denom = metrics::make_loss_normalizer(scenario.test.samples).denominator;
      mean_losses[si] += raw / denom / static_cast<double>(kSeeds.size());
    }
  }

  bool increasing = true;
  for (std::size_t i = 1; i < mean_losses.size(); ++i) {
    if (!(mean_losses[i] > mean_losses[i - 1])) increasing = false;
  }
  Outcome outcome;
  outcome.passed = increasing;
  std::ostringstream detail;
  detail << "mean target losses over s=1..4:";
  for (double loss : mean_losses) detail << " " << loss;
  detail << (increasing ? " (strictly increasing)" : " (NOT strictly increasing)");
  outcome.detail = detail.str();
  return outcome;
}

// ---------------------------------------------------------------------------
// Criterion 9: anomaly ROC-AUC dip for intermediate sizes
// ---------------------------------------------------------------------------
Outcome criterion_anomaly() {
  sweep::SweepSpec spec = base_spec();
  spec.axis = sweep::Axis::hidden_dim;
  spec.axis_values = sweep::expand_range(4, 196, 16);
  spec.seeds = {1, 2, 3, 4, 5};
  spec.scenario.scenario = datagen::Scenario::anomaly;
  spec.scenario.probability = 0.3;
  spec.scenario.sar_db = -15.0;
  const sweep::SweepOutput output = sweep::run_model_wise(spec);

  const std::vector<double>& roc = output.roc_auc_mean;
  double interior_min = 1.0;
  for (std::size_t i = 1; i + 1 < roc.size(); ++i) interior_min = std::min(interior_min, roc[i]);
  const double edge_small = roc.front();
  const double edge_large = roc.back();
  const bool roc_ok = edge_small >= interior_min + 0.03 && edge_large >= interior_min + 0.03;

  const metrics::PeakProfile profile =
      metrics::peak_profile(curve_x(output.curve), curve_test(output.curve));

  Outcome outcome;
  outcome.passed = roc_ok && profile.descent_count >= 2;
  std::ostringstream detail;
  detail << "ROC-AUC smallest " << edge_small << ", largest " << edge_large
         << ", interior min " << interior_min << " (need both edges >= min+0.03); clean test"
         << " descents " << profile.descent_count << " (need >=2)";
  outcome.detail = detail.str();
  return outcome;
}

// ---------------------------------------------------------------------------
// Criterion 10: bitwise determinism of a repeated run
// ---------------------------------------------------------------------------
Outcome criterion_determinism() {
  sweep::SweepSpec spec = model_wise_spec();
  spec.axis_values = {4};
  spec.seeds = {1};

  std::vector<std::string> row_a, row_b;
  for (int repeat = 0; repeat < 2; ++repeat) {
    const sweep::SweepOutput output = sweep::run_model_wise(spec);
    const std::string path = "acceptance_runs_" + std::to_string(repeat) + ".csv";
    sweep::write_runs_csv(path, spec, output.runs);
    const csv::Table table = csv::read_file(path);
    std::remove(path.c_str());
    const std::size_t wall_col = table.column("wall_seconds");
    std::vector<std::string> row = table.rows.at(0);
    row.at(wall_col) = "";  // the only field allowed to differ
    (repeat == 0 ? row_a : row_b) = row;
  }

  Outcome outcome;
  outcome.passed = row_a == row_b;
  outcome.detail = outcome.passed
                       ? "repeated smallest cell produced identical runs.csv fields"
                       : "repeated run differs outside wall_seconds";
  return outcome;
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*fn)();
};

const Criterion kCriteria[] = {
    {1, "SNR calibration", criterion_snr_calibration},
    {2, "gradient oracle", criterion_gradient_oracle},
    {3, "metric oracles", criterion_metric_oracles},
    {4, "loss normalization", criterion_normalization},
    {5, "model-wise double descent", criterion_model_wise},
    {6, "epoch-wise double descent", criterion_epoch_wise},
    {7, "sample-wise non-monotonicity", criterion_sample_wise},
    {8, "domain-shift ordering", criterion_domain_shift},
    {9, "anomaly ROC-AUC profile", criterion_anomaly},
    {10, "determinism", criterion_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  for (const Criterion& criterion : kCriteria) {
    if (only != 0 && criterion.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.fn();
    } catch (const std::exception& e) {
      outcome.passed = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d (%s): %s [%.1fs]\n", outcome.passed ? "PASS" : "FAIL",
                criterion.id, criterion.name, outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!outcome.passed) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
