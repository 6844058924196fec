// Command-line front end: experiment configs in, CSV curves and SVG plots out.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "descentlab/autoencoder.hpp"
#include "descentlab/config.hpp"
#include "descentlab/csv.hpp"
#include "descentlab/datagen.hpp"
#include "descentlab/metrics.hpp"
#include "descentlab/realdata.hpp"
#include "descentlab/rng.hpp"
#include "descentlab/svg.hpp"
#include "descentlab/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace descentlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string profile;
  std::string seed_list;
  std::size_t parallelism = 0;
};

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw config::config_error("--seed-list contains no seeds");
  return seeds;
}

// Loads the config file and applies command-line and environment overrides
// before validation so profile-dependent defaults resolve consistently.
config::ExperimentConfig load_config(const CommonOpts& opts,
                                     const std::string& force_axis = "") {
  if (opts.config_path.empty()) throw config::config_error("--config is required");
  std::ifstream in(opts.config_path);
  if (!in) throw config::config_error("cannot open config file '" + opts.config_path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  json root;
  try {
    root = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw config::config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw config::config_error("config root must be a JSON object");

  if (!opts.profile.empty()) root["profile"] = opts.profile;
  if (!opts.seed_list.empty()) root["sweep"]["seeds"] = parse_seed_list(opts.seed_list);
  if (opts.parallelism > 0) root["sweep"]["parallelism"] = opts.parallelism;
  if (!force_axis.empty()) root["sweep"]["axis"] = force_axis;

  config::ExperimentConfig cfg = config::validate_config_text(root.dump());
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  if (const char* env = std::getenv("DESCENTLAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) cfg.parallelism = static_cast<std::size_t>(v);
  }
  return cfg;
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + path + "'");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
}

void write_dataset_csv(const datagen::Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  for (std::size_t j = 0; j < ds.n_features(); ++j) out << "f" << j << ",";
  out << "flag,batch\n";
  for (std::size_t i = 0; i < ds.n_samples(); ++i) {
    const double* row = ds.samples.row(i);
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
      out << csv::format_double(row[j]) << ",";
    }
    out << datagen::to_string(ds.flags[i]) << "," << ds.batch_labels[i] << "\n";
  }
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

// Embeddings of train (batch 0) and test (batch 1) rows for one run.
void write_embeddings_csv(const Matrix& train_emb, const Matrix& test_emb,
                          const std::vector<datagen::SampleFlag>& train_flags,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  for (std::size_t j = 0; j < train_emb.cols(); ++j) out << "e" << j << ",";
  out << "flag,batch\n";
  const auto dump = [&](const Matrix& emb, int batch, bool flagged) {
    for (std::size_t i = 0; i < emb.rows(); ++i) {
      for (std::size_t j = 0; j < emb.cols(); ++j) {
        out << csv::format_double(emb(i, j)) << ",";
      }
      const char* flag = flagged && i < train_flags.size()
                             ? datagen::to_string(train_flags[i])
                             : "clean";
      out << flag << "," << batch << "\n";
    }
  };
  dump(train_emb, 0, true);
  dump(test_emb, 1, false);
}

std::string run_tag(const sweep::RunKey& key) {
  std::string tag = "x" + csv::format_double(key.axis_value);
  if (key.axis_value2 > 0.0) tag += "_b" + csv::format_double(key.axis_value2);
  tag += "_seed" + std::to_string(key.seed);
  return tag;
}

void write_status(const std::string& path, const std::vector<sweep::RunResult>& runs) {
  json failed = json::array();
  for (const auto& r : runs) {
    if (r.failed) {
      failed.push_back({{"axis_value", r.key.axis_value},
                        {"axis_value2", r.key.axis_value2},
                        {"seed", r.key.seed},
                        {"error", r.error}});
    }
  }
  const json status = {{"status", failed.empty() ? "ok" : "partial"},
                       {"total_runs", runs.size()},
                       {"failed_runs", failed}};
  write_text(path, status.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

int cmd_generate(const CommonOpts& opts) {
  const config::ExperimentConfig cfg = load_config(opts);
  ensure_dir(cfg.output_dir);
  write_text(cfg.output_dir + "/config.resolved.json", config::emit_config(cfg));

  json meta;
  meta["scenario"] = datagen::to_string(cfg.scenario.scenario);
  json per_seed = json::object();

  if (!cfg.real) {
    for (std::uint64_t seed : cfg.seeds) {
      datagen::SubspaceSpec data = cfg.data;
      data.seed = seed;
      const datagen::ScenarioData scenario = datagen::build_scenario(data, cfg.scenario);
      datagen::Dataset test = scenario.test;
      if (cfg.scenario.scenario == datagen::Scenario::domain_shift) {
        std::fill(test.batch_labels.begin(), test.batch_labels.end(), 1);
      }
      write_dataset_csv(scenario.train, cfg.output_dir + "/train_seed" + std::to_string(seed) + ".csv");
      write_dataset_csv(test, cfg.output_dir + "/test_seed" + std::to_string(seed) + ".csv");
      json entry;
      entry["theta"] = scenario.theta;
      entry["noisy_rows"] = scenario.train.count_flag(datagen::SampleFlag::noisy);
      entry["anomaly_rows"] = scenario.train.count_flag(datagen::SampleFlag::anomaly);
      if (scenario.train.noisy_feature_mask) {
        json mask = json::array();
        for (std::size_t j = 0; j < scenario.train.noisy_feature_mask->size(); ++j) {
          if ((*scenario.train.noisy_feature_mask)[j]) mask.push_back(j);
        }
        entry["noisy_features"] = mask;
      }
      per_seed[std::to_string(seed)] = entry;
    }
  } else {
    realdata::CsvSchema schema;
    schema.feature_columns = cfg.real->feature_columns;
    schema.batch_column = cfg.real->batch_column;
    schema.label_column = cfg.real->label_column;
    schema.delimiter = cfg.real->delimiter[0];
    schema.strict = false;
    realdata::TabularDataset base = realdata::load_csv(cfg.real->csv_path, schema);
    if (cfg.real->top_features > 0 && cfg.real->top_features < base.n_features()) {
      base = realdata::select_top_features(base, cfg.real->top_features);
    }
    meta["ingested_rows"] = base.n_samples();
    meta["skipped_rows"] = base.skipped_rows;
    meta["feature_ranking"] = "variance of raw ingested values";
    for (std::uint64_t seed : cfg.seeds) {
      realdata::TabularSplit split = realdata::shuffled_split(base, cfg.real->n_train, seed);
      json entry;
      if (cfg.scenario.scenario == datagen::Scenario::sample_noise) {
        const auto report = realdata::apply_real_sample_noise(split.train, cfg.scenario.probability,
                                                              cfg.scenario.snr_db, seed);
        entry["noised_rows"] = report.noised_rows;
        entry["skipped_zero_norm"] = report.skipped_zero_norm;
      } else if (cfg.scenario.scenario == datagen::Scenario::feature_noise) {
        const auto report = realdata::apply_real_feature_noise(split.train, cfg.scenario.probability,
                                                               cfg.scenario.snr_db, seed);
        json mask = json::array();
        for (std::size_t j = 0; j < report.feature_mask.size(); ++j) {
          if (report.feature_mask[j]) mask.push_back(j);
        }
        entry["noisy_features"] = mask;
        entry["skipped_zero_norm"] = report.skipped_zero_norm;
      }
      realdata::export_csv(split.train, cfg.output_dir + "/train_seed" + std::to_string(seed) + ".csv");
      realdata::export_csv(split.test, cfg.output_dir + "/test_seed" + std::to_string(seed) + ".csv");
      per_seed[std::to_string(seed)] = entry;
    }
  }
  meta["seeds"] = per_seed;
  write_text(cfg.output_dir + "/meta.json", meta.dump(2) + "\n");
  std::cout << "wrote datasets for " << cfg.seeds.size() << " seed(s) to " << cfg.output_dir
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

// Per-seed environment of the real-data path, mirroring the synthetic
// scenario construction: contaminated train rows, clean test rows, and a
// labeled eval set when anomaly labels exist.
struct RealSeedData {
  Matrix train;
  Matrix test;
  Matrix eval_set;
  std::vector<bool> eval_labels;
  std::vector<int> test_batches;
  std::vector<datagen::SampleFlag> train_flags;
};

std::shared_ptr<const RealSeedData> build_real_seed_data(const config::ExperimentConfig& cfg,
                                                         const realdata::TabularDataset& base,
                                                         std::uint64_t seed) {
  auto env = std::make_shared<RealSeedData>();
  switch (cfg.scenario.scenario) {
    case datagen::Scenario::sample_noise:
    case datagen::Scenario::feature_noise: {
      realdata::TabularSplit split = realdata::shuffled_split(base, cfg.real->n_train, seed);
      env->train_flags.assign(split.train.n_samples(), datagen::SampleFlag::clean);
      if (cfg.scenario.scenario == datagen::Scenario::sample_noise) {
        realdata::apply_real_sample_noise(split.train, cfg.scenario.probability,
                                          cfg.scenario.snr_db, seed);
      } else {
        realdata::apply_real_feature_noise(split.train, cfg.scenario.probability,
                                           cfg.scenario.snr_db, seed);
      }
      env->train = std::move(split.train.matrix);
      env->test = std::move(split.test.matrix);
      break;
    }
    case datagen::Scenario::domain_shift: {
      int source_id = -1;
      for (std::size_t i = 0; i < base.batch_names.size(); ++i) {
        if (base.batch_names[i] == cfg.real->source_batch) source_id = static_cast<int>(i);
      }
      if (source_id < 0) {
        throw config::config_error("scenario.real.source_batch '" + cfg.real->source_batch +
                                   "' not found in the ingested data");
      }
      realdata::SourceTargetSplit split = realdata::split_source_target(base, source_id);
      env->train = std::move(split.source.matrix);
      std::size_t total = 0;
      for (const auto& [id, target] : split.targets) total += target.n_samples();
      env->test = Matrix(total, env->train.cols());
      std::size_t at = 0;
      for (const auto& [id, target] : split.targets) {
        for (std::size_t r = 0; r < target.n_samples(); ++r, ++at) {
          std::copy_n(target.matrix.row(r), target.matrix.cols(), env->test.row(at));
          env->test_batches.push_back(id);
        }
      }
      env->train_flags.assign(env->train.rows(), datagen::SampleFlag::clean);
      break;
    }
    case datagen::Scenario::anomaly: {
      if (!base.anomaly_flags) {
        throw config::config_error(
            "anomaly scenario on real data requires scenario.real.label_column");
      }
      realdata::TabularSplit split = realdata::shuffled_split(base, cfg.real->n_train, seed);
      env->train = std::move(split.train.matrix);
      env->train_flags.assign(env->train.rows(), datagen::SampleFlag::clean);
      for (std::size_t i = 0; i < env->train_flags.size(); ++i) {
        if ((*split.train.anomaly_flags)[i]) env->train_flags[i] = datagen::SampleFlag::anomaly;
      }
      // test loss on the clean rows; ROC-AUC on the full labeled holdout
      const auto& flags = *split.test.anomaly_flags;
      std::size_t clean_rows = 0;
      for (bool f : flags) clean_rows += f ? 0 : 1;
      env->test = Matrix(clean_rows, split.test.matrix.cols());
      std::size_t at = 0;
      for (std::size_t r = 0; r < split.test.n_samples(); ++r) {
        if (flags[r]) continue;
        std::copy_n(split.test.matrix.row(r), split.test.matrix.cols(), env->test.row(at++));
      }
      env->eval_set = std::move(split.test.matrix);
      env->eval_labels.assign(flags.begin(), flags.end());
      break;
    }
  }
  return env;
}

realdata::TabularDataset ingest_real(const config::ExperimentConfig& cfg) {
  realdata::CsvSchema schema;
  schema.feature_columns = cfg.real->feature_columns;
  schema.batch_column = cfg.real->batch_column;
  schema.label_column = cfg.real->label_column;
  schema.delimiter = cfg.real->delimiter[0];
  schema.strict = false;
  realdata::TabularDataset base = realdata::load_csv(cfg.real->csv_path, schema);
  if (cfg.real->top_features > 0 && cfg.real->top_features < base.n_features()) {
    base = realdata::select_top_features(base, cfg.real->top_features);
  }
  return base;
}

sweep::SweepOutput run_real_sweep(const config::ExperimentConfig& cfg, const std::string& kind) {
  if (cfg.axis == sweep::Axis::grid) {
    throw config::config_error("grid sweeps are not supported on the real-data path");
  }
  const realdata::TabularDataset base = ingest_real(cfg);
  std::vector<std::shared_ptr<const RealSeedData>> envs;
  for (std::uint64_t seed : cfg.seeds) envs.push_back(build_real_seed_data(cfg, base, seed));
  const std::size_t input_dim = envs.front()->train.cols();

  const std::vector<std::size_t> axis_values =
      kind == "epoch-wise" ? std::vector<std::size_t>{cfg.train.epochs} : cfg.axis_values;

  std::vector<sweep::Job> jobs;
  for (std::size_t value : axis_values) {
    for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
      nn::Architecture arch = cfg.model;
      arch.input_dim = input_dim;
      if (kind == "model-wise") {
        if (cfg.axis == sweep::Axis::hidden_dim) {
          arch.hidden_dim = value;
        } else {
          arch.bottleneck_dim = value;
        }
      }
      nn::TrainConfig train_cfg = cfg.train;
      train_cfg.seed = cfg.seeds[si];
      train_cfg.capture_embeddings = cfg.save_embeddings;
      sweep::RunKey key{"real", static_cast<double>(value), 0.0, cfg.seeds[si]};
      const auto env = envs[si];
      const bool keep_model = cfg.save_models;
      const bool sample_axis = kind == "sample-wise";
      jobs.push_back({key, [env, key, arch, train_cfg, value, keep_model, sample_axis] {
                        sweep::RunResult result;
                        result.key = key;
                        const Matrix& full = env->train;
                        const Matrix subset =
                            sample_axis ? full.top_rows(std::min<std::size_t>(value, full.rows()))
                                        : full;
                        nn::AutoencoderModel model = nn::init_model(arch, train_cfg.seed);
                        result.record = nn::train(model, subset, env->test, train_cfg);
                        if (!env->eval_set.empty()) {
                          result.roc_auc = metrics::roc_auc(metrics::reconstruction_scores(
                              model, env->eval_set, env->eval_labels));
                        }
                        if (keep_model) result.model = std::move(model);
                        return result;
                      }});
    }
  }

  std::vector<sweep::RunResult> results = sweep::schedule(std::move(jobs), cfg.parallelism);
  if (kind == "epoch-wise") {
    std::vector<double> train_denoms, test_denoms;
    for (const auto& env : envs) {
      train_denoms.push_back(metrics::make_loss_normalizer(env->train).denominator);
      test_denoms.push_back(metrics::make_loss_normalizer(env->test).denominator);
    }
    sweep::SweepOutput output;
    output.runs = std::move(results);
    output.curve = sweep::aggregate_epoch_curve(output.runs, train_denoms, test_denoms);
    return output;
  }
  return sweep::aggregate_curve(std::move(results), axis_values, cfg.seeds.size(),
                                sweep::to_string(cfg.axis));
}

int cmd_sweep(const CommonOpts& opts, const std::string& kind) {
  const std::string forced_axis =
      kind == "epoch-wise" ? "epochs" : (kind == "sample-wise" ? "n_train" : "");
  const config::ExperimentConfig cfg = load_config(opts, forced_axis);
  if (kind == "model-wise" && cfg.axis != sweep::Axis::hidden_dim &&
      cfg.axis != sweep::Axis::bottleneck_dim && cfg.axis != sweep::Axis::grid) {
    throw config::config_error("sweep model-wise requires sweep.axis of hidden_dim, "
                               "bottleneck_dim or grid");
  }
  ensure_dir(cfg.output_dir);
  write_text(cfg.output_dir + "/config.resolved.json", config::emit_config(cfg));

  sweep::SweepOutput output;
  if (cfg.real) {
    output = run_real_sweep(cfg, kind);
  } else {
    const sweep::SweepSpec spec = config::to_sweep_spec(cfg);
    if (kind == "model-wise") {
      output = sweep::run_model_wise(spec);
    } else if (kind == "epoch-wise") {
      output = sweep::run_epoch_wise(spec);
    } else {
      output = sweep::run_sample_wise(spec);
    }
  }

  const sweep::SweepSpec spec_for_csv = config::to_sweep_spec(cfg);
  sweep::write_runs_csv(cfg.output_dir + "/runs.csv", spec_for_csv, output.runs);
  if (!output.grid.empty()) {
    sweep::write_grid_csv(cfg.output_dir + "/curve_grid.csv", output.grid);
  } else {
    sweep::write_curve_csv(cfg.output_dir + "/curve.csv", output.curve);
  }
  write_status(cfg.output_dir + "/status.json", output.runs);

  if (cfg.save_embeddings || cfg.save_models) {
    for (const auto& run : output.runs) {
      if (run.failed) continue;
      const std::string tag = run_tag(run.key);
      if (cfg.save_embeddings && run.record.train_embeddings && run.record.test_embeddings) {
        write_embeddings_csv(*run.record.train_embeddings, *run.record.test_embeddings, {},
                             cfg.output_dir + "/embeddings_" + tag + ".csv");
      }
      if (cfg.save_models && run.model) {
        nn::save_model(*run.model, cfg.output_dir + "/model_" + tag + ".bin", run.key.seed);
      }
    }
  }

  std::size_t failed = 0;
  for (const auto& r : output.runs) failed += r.failed ? 1 : 0;
  std::cout << "sweep " << kind << ": " << output.runs.size() - failed << "/" << output.runs.size()
            << " runs ok, outputs in " << cfg.output_dir << "\n";
  if (failed > 0) {
    std::cerr << "warning: " << failed << " run(s) failed; see status.json\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

void append_metric(const std::string& path, const std::string& metric, double value,
                   const std::string& dataset, const std::string& model_id) {
  const bool exists = fs::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for appending");
  if (!exists) out << "metric,value,dataset,model_id\n";
  out << metric << "," << csv::format_double(value) << "," << dataset << "," << model_id << "\n";
}

struct EvalRocOpts {
  std::string model_path;
  std::string data_path;
  std::string out_dir = "out";
  std::string model_id;
};

int cmd_eval_roc(const EvalRocOpts& opts) {
  const nn::AutoencoderModel model = nn::load_model(opts.model_path);
  const csv::Table table = csv::read_file(opts.data_path);

  std::vector<std::size_t> feature_cols;
  std::optional<std::size_t> flag_col, label_col;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] == "flag") {
      flag_col = c;
    } else if (table.header[c] == "label") {
      label_col = c;
    } else if (table.header[c] != "batch") {
      feature_cols.push_back(c);
    }
  }
  if (!flag_col && !label_col) {
    throw config::config_error("eval roc-auc: data needs a 'flag' or 'label' column");
  }
  if (feature_cols.size() != model.arch.input_dim) {
    throw config::config_error("eval roc-auc: data has " + std::to_string(feature_cols.size()) +
                               " features but the model expects " +
                               std::to_string(model.arch.input_dim));
  }
  Matrix data(table.rows.size(), feature_cols.size());
  std::vector<bool> labels(table.rows.size(), false);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t i = 0; i < feature_cols.size(); ++i) {
      data(r, i) = csv::parse_double(table.rows[r][feature_cols[i]], r + 2);
    }
    const std::string& v = table.rows[r][flag_col ? *flag_col : *label_col];
    labels[r] = v == "anomaly" || v == "1";
  }
  const double auc = metrics::roc_auc(metrics::reconstruction_scores(model, data, labels));
  ensure_dir(opts.out_dir);
  const std::string model_id = opts.model_id.empty() ? opts.model_path : opts.model_id;
  append_metric(opts.out_dir + "/metrics.csv", "roc_auc", auc, opts.data_path, model_id);
  std::cout << "roc_auc " << csv::format_double(auc) << "\n";
  return kExitOk;
}

struct EvalKnnOpts {
  std::string embeddings_path;
  std::string out_dir = "out";
  std::string model_id;
  std::size_t k = 10;
  bool per_target = false;
};

int cmd_eval_knn(const EvalKnnOpts& opts) {
  const csv::Table table = csv::read_file(opts.embeddings_path);
  std::vector<std::size_t> feature_cols;
  std::optional<std::size_t> batch_col;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] == "batch") {
      batch_col = c;
    } else if (table.header[c] != "flag" && table.header[c] != "label") {
      feature_cols.push_back(c);
    }
  }
  if (!batch_col) throw config::config_error("eval knn-dat: embeddings need a 'batch' column");
  Matrix emb(table.rows.size(), feature_cols.size());
  std::vector<int> batches(table.rows.size(), 0);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t i = 0; i < feature_cols.size(); ++i) {
      emb(r, i) = csv::parse_double(table.rows[r][feature_cols[i]], r + 2);
    }
    batches[r] = static_cast<int>(csv::parse_double(table.rows[r][*batch_col], r + 2));
  }

  metrics::KnnDatConfig knn_cfg;
  knn_cfg.k = opts.k;
  ensure_dir(opts.out_dir);
  const std::string metrics_path = opts.out_dir + "/metrics.csv";
  const std::string model_id = opts.model_id.empty() ? opts.embeddings_path : opts.model_id;

  const double pooled = metrics::knn_dat(emb, batches, knn_cfg);
  append_metric(metrics_path, "knn_dat", pooled, opts.embeddings_path, model_id);
  std::cout << "knn_dat " << csv::format_double(pooled) << "\n";

  if (opts.per_target) {
    // batch 0 is the source; score each target against it separately.
    std::set<int> targets(batches.begin(), batches.end());
    targets.erase(0);
    double sum = 0.0;
    for (int target : targets) {
      std::vector<std::size_t> keep;
      for (std::size_t r = 0; r < batches.size(); ++r) {
        if (batches[r] == 0 || batches[r] == target) keep.push_back(r);
      }
      Matrix sub(keep.size(), emb.cols());
      std::vector<int> sub_batches(keep.size());
      for (std::size_t i = 0; i < keep.size(); ++i) {
        std::copy_n(emb.row(keep[i]), emb.cols(), sub.row(i));
        sub_batches[i] = batches[keep[i]];
      }
      const double score = metrics::knn_dat(sub, sub_batches, knn_cfg);
      sum += score;
      append_metric(metrics_path, "knn_dat_target_" + std::to_string(target), score,
                    opts.embeddings_path, model_id);
      std::cout << "knn_dat_target_" << target << " " << csv::format_double(score) << "\n";
    }
    if (!targets.empty()) {
      const double mean = sum / static_cast<double>(targets.size());
      append_metric(metrics_path, "knn_dat_target_mean", mean, opts.embeddings_path, model_id);
      std::cout << "knn_dat_target_mean " << csv::format_double(mean) << "\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// plot
// ---------------------------------------------------------------------------

struct PlotOpts {
  std::string in_path;
  std::string out_path = "curve.svg";
  std::string title;
  std::string x_label = "x";
  bool log_y = false;
};

int cmd_plot(const PlotOpts& opts) {
  const sweep::CurveTable curve = sweep::read_curve_csv(opts.in_path);
  if (curve.rows.size() < 2) {
    throw config::config_error("plot: curve '" + opts.in_path + "' has fewer than 2 points");
  }
  svg::Series train{"train", "#1f77b4", {}};
  svg::Series test{"test", "#d62728", {}};
  for (const auto& p : curve.rows) {
    train.points.push_back({p.x, p.mean_train, p.stderr_train});
    test.points.push_back({p.x, p.mean_test, p.stderr_test});
  }
  svg::ChartOptions chart;
  chart.title = opts.title;
  chart.x_label = opts.x_label;
  chart.y_label = "normalized loss";
  chart.log_y = opts.log_y;
  svg::write_chart(opts.out_path, {train, test}, chart);
  std::cout << "wrote " << opts.out_path << "\n";
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "Experiment config file (JSON)");
  cmd->add_option("--out", opts.out_dir, "Output directory (overrides config output_dir)");
  cmd->add_option("--profile", opts.profile, "Default profile: desk or paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--seed-list", opts.seed_list, "Comma-separated seeds (overrides config)");
  cmd->add_option("--parallelism", opts.parallelism, "Concurrent training workers");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"descentlab: double-descent experiments with under-complete autoencoders"};
  app.require_subcommand(1);

  CommonOpts generate_opts;
  CLI::App* generate = app.add_subcommand("generate", "Write contaminated dataset CSVs");
  add_common(generate, generate_opts);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a descent-curve experiment sweep");
  sweep_cmd->require_subcommand(1);
  CommonOpts model_opts, epoch_opts, sample_opts;
  CLI::App* model_wise = sweep_cmd->add_subcommand("model-wise", "Loss vs model size");
  add_common(model_wise, model_opts);
  CLI::App* epoch_wise = sweep_cmd->add_subcommand("epoch-wise", "Loss vs training epochs");
  add_common(epoch_wise, epoch_opts);
  CLI::App* sample_wise = sweep_cmd->add_subcommand("sample-wise", "Loss vs training-set size");
  add_common(sample_wise, sample_opts);

  CLI::App* eval_cmd = app.add_subcommand("eval", "Post-training metrics");
  eval_cmd->require_subcommand(1);
  EvalRocOpts roc_opts;
  CLI::App* eval_roc = eval_cmd->add_subcommand("roc-auc", "Reconstruction-error ROC-AUC");
  eval_roc->add_option("--model", roc_opts.model_path, "Model checkpoint")->required();
  eval_roc->add_option("--data", roc_opts.data_path, "Labeled dataset CSV")->required();
  eval_roc->add_option("--out", roc_opts.out_dir, "Output directory for metrics.csv");
  eval_roc->add_option("--model-id", roc_opts.model_id, "Identifier in the metrics row");
  EvalKnnOpts knn_opts;
  CLI::App* eval_knn = eval_cmd->add_subcommand("knn-dat", "KNN domain-adaptation test");
  eval_knn->add_option("--embeddings", knn_opts.embeddings_path, "Embeddings CSV")->required();
  eval_knn->add_option("--out", knn_opts.out_dir, "Output directory for metrics.csv");
  eval_knn->add_option("--model-id", knn_opts.model_id, "Identifier in the metrics row");
  eval_knn->add_option("--k", knn_opts.k, "Neighbors per point (default 10)");
  eval_knn->add_flag("--per-target", knn_opts.per_target,
                     "Also score each target batch against source batch 0");

  PlotOpts plot_opts;
  CLI::App* plot = app.add_subcommand("plot", "Render a curve.csv as an SVG line chart");
  plot->add_option("--in", plot_opts.in_path, "curve.csv to plot")->required();
  plot->add_option("--out", plot_opts.out_path, "Output SVG path");
  plot->add_option("--title", plot_opts.title, "Chart title");
  plot->add_option("--x-label", plot_opts.x_label, "X-axis label");
  plot->add_flag("--log-y", plot_opts.log_y, "Logarithmic y axis");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(generate_opts);
    if (model_wise->parsed()) return cmd_sweep(model_opts, "model-wise");
    if (epoch_wise->parsed()) return cmd_sweep(epoch_opts, "epoch-wise");
    if (sample_wise->parsed()) return cmd_sweep(sample_opts, "sample-wise");
    if (eval_roc->parsed()) return cmd_eval_roc(roc_opts);
    if (eval_knn->parsed()) return cmd_eval_knn(knn_opts);
    if (plot->parsed()) return cmd_plot(plot_opts);
  } catch (const config::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
