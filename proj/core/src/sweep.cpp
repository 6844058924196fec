#include "descentlab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <set>
#include <stdexcept>
#include <thread>

#include "descentlab/csv.hpp"
#include "descentlab/metrics.hpp"
#include "descentlab/rng.hpp"

namespace descentlab::sweep {

Axis axis_from_string(const std::string& name) {
  if (name == "hidden_dim") return Axis::hidden_dim;
  if (name == "bottleneck_dim") return Axis::bottleneck_dim;
  if (name == "grid") return Axis::grid;
  if (name == "epochs") return Axis::epochs;
  if (name == "n_train") return Axis::n_train;
  throw std::invalid_argument(
      "unknown axis '" + name +
      "' (expected hidden_dim, bottleneck_dim, grid, epochs or n_train)");
}

const char* to_string(Axis axis) {
  switch (axis) {
    case Axis::hidden_dim: return "hidden_dim";
    case Axis::bottleneck_dim: return "bottleneck_dim";
    case Axis::grid: return "grid";
    case Axis::epochs: return "epochs";
    case Axis::n_train: return "n_train";
  }
  return "unknown";
}

std::vector<std::size_t> expand_range(std::size_t from, std::size_t to, std::size_t step) {
  if (step == 0) throw std::invalid_argument("range step must be positive");
  if (to < from) throw std::invalid_argument("range end must be >= start");
  std::vector<std::size_t> values;
  for (std::size_t v = from; v <= to; v += step) values.push_back(v);
  return values;
}

std::size_t default_parallelism() {
  if (const char* env = std::getenv("DESCENTLAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

namespace {

std::string scenario_hash(const SweepSpec& spec) {
  // FNV-1a over the scenario-defining fields.
  std::string repr = std::string(datagen::to_string(spec.scenario.scenario)) + "|" +
                     csv::format_double(spec.scenario.probability) + "|" +
                     csv::format_double(spec.scenario.snr_db) + "|" +
                     csv::format_double(spec.scenario.sar_db) + "|" +
                     csv::format_double(spec.scenario.shift_scale) + "|" +
                     csv::format_double(spec.scenario.shift_noise_p) + "|" +
                     csv::format_double(spec.scenario.shift_noise_snr_db) + "|" +
                     std::to_string(spec.data.latent_dim) + "x" +
                     std::to_string(spec.data.ambient_dim) + "|" +
                     std::to_string(spec.data.n_train) + "/" + std::to_string(spec.data.n_test);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : repr) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string key_repr(const RunKey& key) {
  return key.scenario_hash + "|" + csv::format_double(key.axis_value) + "|" +
         csv::format_double(key.axis_value2) + "|" + std::to_string(key.seed);
}

// Everything one seed's runs share: the dataset realization, normalizers and
// (for anomaly scenarios) the labeled evaluation set.
struct SeedEnv {
  std::uint64_t seed = 0;
  datagen::ScenarioData data;
  Matrix eval_set;               // anomaly scenarios: clean test + injected anomalies
  std::vector<bool> eval_labels;
};

std::shared_ptr<const SeedEnv> build_seed_env(const SweepSpec& spec, std::uint64_t seed,
                                              std::size_t n_train_override = 0) {
  auto env = std::make_shared<SeedEnv>();
  env->seed = seed;
  datagen::SubspaceSpec data_spec = spec.data;
  data_spec.seed = seed;
  if (n_train_override > 0) data_spec.n_train = n_train_override;
  env->data = datagen::build_scenario(data_spec, spec.scenario);
  if (spec.scenario.scenario == datagen::Scenario::anomaly) {
    const datagen::AnomalySpec anomaly = datagen::make_anomaly_spec(
        spec.scenario.probability, spec.scenario.sar_db, data_spec.latent_dim);
    const datagen::Dataset mixed = datagen::inject_anomalies(
        env->data.test, anomaly, Rng::derive_seed(seed, streams::eval_anomalies));
    env->eval_set = mixed.samples;
    env->eval_labels.reserve(mixed.flags.size());
    for (const auto flag : mixed.flags) {
      env->eval_labels.push_back(flag == datagen::SampleFlag::anomaly);
    }
  }
  return env;
}

RunResult execute_run(const std::shared_ptr<const SeedEnv>& env, const RunKey& key,
                      const nn::Architecture& arch, const nn::TrainConfig& cfg,
                      const Matrix& train_matrix, bool capture_model) {
  RunResult result;
  result.key = key;
  nn::AutoencoderModel model = nn::init_model(arch, cfg.seed);
  result.record = nn::train(model, train_matrix, env->data.test.samples, cfg);
  if (!env->eval_set.empty()) {
    result.roc_auc =
        metrics::roc_auc(metrics::reconstruction_scores(model, env->eval_set, env->eval_labels));
  }
  if (capture_model) result.model = std::move(model);
  return result;
}

struct Aggregate {
  double mean_train = 0.0, mean_test = 0.0;
  double stderr_train = 0.0, stderr_test = 0.0;
  std::size_t n = 0;
};

Aggregate aggregate_finals(const std::vector<const RunResult*>& group) {
  Aggregate agg;
  std::vector<double> train, test;
  for (const RunResult* r : group) {
    if (r->failed) continue;
    train.push_back(r->record.final_norm_train);
    test.push_back(r->record.final_norm_test);
  }
  agg.n = train.size();
  if (agg.n == 0) return agg;
  const auto mean_of = [](const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
  };
  const auto stderr_of = [](const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    const double sample_sd = std::sqrt(acc / static_cast<double>(v.size() - 1));
    return sample_sd / std::sqrt(static_cast<double>(v.size()));
  };
  agg.mean_train = mean_of(train);
  agg.mean_test = mean_of(test);
  agg.stderr_train = stderr_of(train, agg.mean_train);
  agg.stderr_test = stderr_of(test, agg.mean_test);
  return agg;
}

void validate_common(const SweepSpec& spec) {
  if (spec.seeds.empty()) throw std::invalid_argument("sweep requires at least one seed");
  datagen::validate(spec.data);
}

nn::TrainConfig run_config(const SweepSpec& spec, std::uint64_t seed) {
  nn::TrainConfig cfg = spec.train;
  cfg.seed = seed;
  cfg.capture_embeddings = spec.capture_embeddings;
  return cfg;
}

}  // namespace

std::vector<RunResult> schedule(std::vector<Job> jobs, std::size_t parallelism) {
  if (parallelism == 0) parallelism = default_parallelism();
  std::set<std::string> seen;
  for (const Job& job : jobs) {
    if (!seen.insert(key_repr(job.key)).second) {
      throw std::invalid_argument("duplicate run key: " + key_repr(job.key));
    }
  }
  std::vector<RunResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        results[i] = jobs[i].work();
      } catch (const std::exception& ex) {
        results[i].key = jobs[i].key;
        results[i].failed = true;
        results[i].error = ex.what();
      }
    }
  };
  const std::size_t n_workers = std::min(parallelism, jobs.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

SweepOutput aggregate_curve(std::vector<RunResult> runs,
                            const std::vector<std::size_t>& axis_values, std::size_t n_seeds,
                            const std::string& x_name) {
  if (runs.size() != axis_values.size() * n_seeds) {
    throw std::invalid_argument("aggregate_curve: result count does not match axis x seeds");
  }
  SweepOutput output;
  output.runs = std::move(runs);
  output.curve.x_name = x_name;
  std::size_t idx = 0;
  for (std::size_t value : axis_values) {
    std::vector<const RunResult*> group;
    double roc_sum = 0.0;
    std::size_t roc_n = 0;
    for (std::size_t si = 0; si < n_seeds; ++si, ++idx) {
      group.push_back(&output.runs[idx]);
      if (!output.runs[idx].failed && output.runs[idx].roc_auc) {
        roc_sum += *output.runs[idx].roc_auc;
        ++roc_n;
      }
    }
    const Aggregate agg = aggregate_finals(group);
    output.curve.rows.push_back({static_cast<double>(value), agg.mean_train, agg.mean_test,
                                 agg.stderr_train, agg.stderr_test, agg.n});
    output.roc_auc_mean.push_back(roc_n > 0 ? roc_sum / static_cast<double>(roc_n)
                                            : std::nan(""));
  }
  return output;
}

SweepOutput run_model_wise(const SweepSpec& spec) {
  validate_common(spec);
  if (spec.axis != Axis::hidden_dim && spec.axis != Axis::bottleneck_dim &&
      spec.axis != Axis::grid) {
    throw std::invalid_argument("run_model_wise requires a model-size axis");
  }
  if (spec.axis_values.empty()) throw std::invalid_argument("axis_values must be non-empty");
  if (spec.axis == Axis::grid && spec.grid_bottlenecks.empty()) {
    throw std::invalid_argument("grid axis requires grid_bottlenecks");
  }
  const std::string hash = scenario_hash(spec);

  std::vector<std::shared_ptr<const SeedEnv>> envs;
  envs.reserve(spec.seeds.size());
  for (std::uint64_t seed : spec.seeds) envs.push_back(build_seed_env(spec, seed));

  const std::vector<std::size_t> bottlenecks =
      spec.axis == Axis::grid ? spec.grid_bottlenecks
                              : std::vector<std::size_t>{spec.base_arch.bottleneck_dim};

  std::vector<Job> jobs;
  for (std::size_t value : spec.axis_values) {
    for (std::size_t b : bottlenecks) {
      for (std::size_t si = 0; si < spec.seeds.size(); ++si) {
        nn::Architecture arch = spec.base_arch;
        arch.input_dim = spec.data.ambient_dim;
        switch (spec.axis) {
          case Axis::hidden_dim: arch.hidden_dim = value; break;
          case Axis::bottleneck_dim: arch.bottleneck_dim = value; break;
          case Axis::grid:
            arch.hidden_dim = value;
            arch.bottleneck_dim = b;
            break;
          default: break;
        }
        RunKey key{hash, static_cast<double>(value),
                   spec.axis == Axis::grid ? static_cast<double>(b) : 0.0, spec.seeds[si]};
        const auto env = envs[si];
        const nn::TrainConfig cfg = run_config(spec, spec.seeds[si]);
        const bool keep_model = spec.capture_models;
        jobs.push_back({key, [env, key, arch, cfg, keep_model] {
                          return execute_run(env, key, arch, cfg, env->data.train.samples,
                                             keep_model);
                        }});
      }
    }
  }

  std::vector<RunResult> results = schedule(std::move(jobs), spec.parallelism);
  if (spec.axis != Axis::grid) {
    return aggregate_curve(std::move(results), spec.axis_values, spec.seeds.size(),
                           to_string(spec.axis));
  }

  SweepOutput output;
  output.runs = std::move(results);
  output.curve.x_name = to_string(spec.axis);
  std::size_t idx = 0;
  for (std::size_t value : spec.axis_values) {
    for (std::size_t b : bottlenecks) {
      std::vector<const RunResult*> group;
      double roc_sum = 0.0;
      std::size_t roc_n = 0;
      for (std::size_t si = 0; si < spec.seeds.size(); ++si, ++idx) {
        group.push_back(&output.runs[idx]);
        if (!output.runs[idx].failed && output.runs[idx].roc_auc) {
          roc_sum += *output.runs[idx].roc_auc;
          ++roc_n;
        }
      }
      const Aggregate agg = aggregate_finals(group);
      output.grid.push_back({static_cast<double>(value), static_cast<double>(b), agg.mean_train,
                             agg.mean_test, agg.stderr_train, agg.stderr_test, agg.n});
      output.roc_auc_mean.push_back(roc_n > 0 ? roc_sum / static_cast<double>(roc_n)
                                              : std::nan(""));
    }
  }
  return output;
}

SweepOutput run_epoch_wise(const SweepSpec& spec) {
  validate_common(spec);
  if (spec.axis != Axis::epochs) throw std::invalid_argument("run_epoch_wise requires axis=epochs");
  const std::string hash = scenario_hash(spec);

  std::vector<Job> jobs;
  std::vector<std::shared_ptr<const SeedEnv>> envs;
  for (std::size_t si = 0; si < spec.seeds.size(); ++si) {
    const std::uint64_t seed = spec.seeds[si];
    const auto env = build_seed_env(spec, seed);
    envs.push_back(env);
    nn::Architecture arch = spec.base_arch;
    arch.input_dim = spec.data.ambient_dim;
    RunKey key{hash, static_cast<double>(spec.train.epochs), 0.0, seed};
    const nn::TrainConfig cfg = run_config(spec, seed);
    const bool keep_model = spec.capture_models;
    jobs.push_back({key, [env, key, arch, cfg, keep_model] {
                      return execute_run(env, key, arch, cfg, env->data.train.samples,
                                         keep_model);
                    }});
  }

  SweepOutput output;
  output.runs = schedule(std::move(jobs), spec.parallelism);

  // Per-seed normalizers turn the recorded raw losses into normalized curves.
  std::vector<double> train_denoms(spec.seeds.size(), 0.0), test_denoms(spec.seeds.size(), 0.0);
  for (std::size_t si = 0; si < spec.seeds.size(); ++si) {
    train_denoms[si] = metrics::make_loss_normalizer(envs[si]->data.train.samples).denominator;
    test_denoms[si] = metrics::make_loss_normalizer(envs[si]->data.test.samples).denominator;
  }
  output.curve = aggregate_epoch_curve(output.runs, train_denoms, test_denoms);
  return output;
}

CurveTable aggregate_epoch_curve(const std::vector<RunResult>& runs,
                                 const std::vector<double>& train_denominators,
                                 const std::vector<double>& test_denominators) {
  if (runs.size() != train_denominators.size() || runs.size() != test_denominators.size()) {
    throw std::invalid_argument("aggregate_epoch_curve: one denominator pair per run required");
  }
  CurveTable curve;
  curve.x_name = "epoch";
  const RunResult* reference = nullptr;
  for (const RunResult& r : runs) {
    if (!r.failed) {
      reference = &r;
      break;
    }
  }
  if (reference == nullptr) return curve;

  const auto& epochs = reference->record.eval_epochs;
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    std::vector<double> train, test;
    for (std::size_t si = 0; si < runs.size(); ++si) {
      const RunResult& r = runs[si];
      if (r.failed || r.record.eval_epochs.size() != epochs.size()) continue;
      train.push_back(r.record.train_mse[e] / train_denominators[si]);
      test.push_back(r.record.test_mse[e] / test_denominators[si]);
    }
    CurvePoint point;
    point.x = static_cast<double>(epochs[e]);
    point.n_seeds = train.size();
    if (!train.empty()) {
      for (double v : train) point.mean_train += v;
      for (double v : test) point.mean_test += v;
      point.mean_train /= static_cast<double>(train.size());
      point.mean_test /= static_cast<double>(test.size());
      if (train.size() >= 2) {
        double acc_train = 0.0, acc_test = 0.0;
        for (double v : train) acc_train += (v - point.mean_train) * (v - point.mean_train);
        for (double v : test) acc_test += (v - point.mean_test) * (v - point.mean_test);
        const double n = static_cast<double>(train.size());
        point.stderr_train = std::sqrt(acc_train / (n - 1.0)) / std::sqrt(n);
        point.stderr_test = std::sqrt(acc_test / (n - 1.0)) / std::sqrt(n);
      }
    }
    curve.rows.push_back(point);
  }
  return curve;
}

SweepOutput run_sample_wise(const SweepSpec& spec) {
  validate_common(spec);
  if (spec.axis != Axis::n_train) throw std::invalid_argument("run_sample_wise requires axis=n_train");
  if (spec.axis_values.empty()) throw std::invalid_argument("axis_values must be non-empty");
  const std::string hash = scenario_hash(spec);
  const std::size_t max_n = *std::max_element(spec.axis_values.begin(), spec.axis_values.end());

  std::vector<std::shared_ptr<const SeedEnv>> envs;
  for (std::uint64_t seed : spec.seeds) envs.push_back(build_seed_env(spec, seed, max_n));

  std::vector<Job> jobs;
  for (std::size_t n_train : spec.axis_values) {
    for (std::size_t si = 0; si < spec.seeds.size(); ++si) {
      nn::Architecture arch = spec.base_arch;
      arch.input_dim = spec.data.ambient_dim;
      RunKey key{hash, static_cast<double>(n_train), 0.0, spec.seeds[si]};
      const auto env = envs[si];
      const nn::TrainConfig cfg = run_config(spec, spec.seeds[si]);
      const bool keep_model = spec.capture_models;
      jobs.push_back({key, [env, key, arch, cfg, n_train, keep_model] {
                        // Nested subsets: the first n_train rows of the
                        // shared realization.
                        const Matrix subset = env->data.train.samples.top_rows(n_train);
                        return execute_run(env, key, arch, cfg, subset, keep_model);
                      }});
    }
  }

  return aggregate_curve(schedule(std::move(jobs), spec.parallelism), spec.axis_values,
                         spec.seeds.size(), "n_train");
}

void write_runs_csv(const std::string& path, const SweepSpec& spec,
                    const std::vector<RunResult>& runs) {
  csv::Table table;
  table.header = {"scenario",        "scenario_hash", "axis",       "axis_value",
                  "axis_value2",     "seed",          "status",     "raw_train_mse",
                  "raw_test_mse",    "norm_train_loss", "norm_test_loss", "roc_auc",
                  "wall_seconds",    "error"};
  for (const RunResult& r : runs) {
    std::vector<std::string> row;
    row.push_back(datagen::to_string(spec.scenario.scenario));
    row.push_back(r.key.scenario_hash);
    row.push_back(to_string(spec.axis));
    row.push_back(csv::format_double(r.key.axis_value));
    row.push_back(csv::format_double(r.key.axis_value2));
    row.push_back(std::to_string(r.key.seed));
    row.push_back(r.failed ? "failed" : "ok");
    if (r.failed) {
      row.insert(row.end(), {"", "", "", "", ""});
    } else {
      row.push_back(csv::format_double(r.record.final_raw_train));
      row.push_back(csv::format_double(r.record.final_raw_test));
      row.push_back(csv::format_double(r.record.final_norm_train));
      row.push_back(csv::format_double(r.record.final_norm_test));
      row.push_back(r.roc_auc ? csv::format_double(*r.roc_auc) : "");
    }
    row.push_back(r.failed ? "" : csv::format_double(r.record.wall_seconds));
    row.push_back(r.error);
    table.rows.push_back(std::move(row));
  }
  csv::write_file(path, table);
}

void write_curve_csv(const std::string& path, const CurveTable& curve) {
  csv::Table table;
  table.header = {"x", "mean_train_loss", "mean_test_loss", "stderr_train", "stderr_test",
                  "n_seeds"};
  for (const CurvePoint& p : curve.rows) {
    table.rows.push_back({csv::format_double(p.x), csv::format_double(p.mean_train),
                          csv::format_double(p.mean_test), csv::format_double(p.stderr_train),
                          csv::format_double(p.stderr_test), std::to_string(p.n_seeds)});
  }
  csv::write_file(path, table);
}

void write_grid_csv(const std::string& path, const std::vector<GridPoint>& grid) {
  csv::Table table;
  table.header = {"hidden_dim",   "bottleneck_dim", "mean_train_loss", "mean_test_loss",
                  "stderr_train", "stderr_test",    "n_seeds"};
  for (const GridPoint& p : grid) {
    table.rows.push_back({csv::format_double(p.hidden), csv::format_double(p.bottleneck),
                          csv::format_double(p.mean_train), csv::format_double(p.mean_test),
                          csv::format_double(p.stderr_train), csv::format_double(p.stderr_test),
                          std::to_string(p.n_seeds)});
  }
  csv::write_file(path, table);
}

CurveTable read_curve_csv(const std::string& path) {
  const csv::Table table = csv::read_file(path);
  CurveTable curve;
  curve.x_name = "x";
  const std::size_t cx = table.column("x");
  const std::size_t ct = table.column("mean_train_loss");
  const std::size_t cv = table.column("mean_test_loss");
  const std::size_t cst = table.column("stderr_train");
  const std::size_t csv_ = table.column("stderr_test");
  const std::size_t cn = table.column("n_seeds");
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    CurvePoint p;
    p.x = csv::parse_double(row[cx], r + 2);
    p.mean_train = csv::parse_double(row[ct], r + 2);
    p.mean_test = csv::parse_double(row[cv], r + 2);
    p.stderr_train = csv::parse_double(row[cst], r + 2);
    p.stderr_test = csv::parse_double(row[csv_], r + 2);
    p.n_seeds = static_cast<std::size_t>(csv::parse_double(row[cn], r + 2));
    curve.rows.push_back(p);
  }
  return curve;
}

}  // namespace descentlab::sweep
