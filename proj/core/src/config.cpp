#include "descentlab/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace descentlab::config {

using nlohmann::json;

Profile profile_from_string(const std::string& name) {
  if (name == "desk") return Profile::desk;
  if (name == "paper") return Profile::paper;
  throw config_error("unknown profile '" + name + "' (expected desk or paper)");
}

const char* to_string(Profile profile) {
  return profile == Profile::desk ? "desk" : "paper";
}

namespace {

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string nearest_key(const std::string& key, const std::vector<std::string>& known) {
  std::string best;
  std::size_t best_dist = key.size() + 3;
  for (const std::string& candidate : known) {
    const std::size_t d = edit_distance(key, candidate);
    if (d < best_dist) {
      best_dist = d;
      best = candidate;
    }
  }
  return best_dist <= std::max<std::size_t>(2, key.size() / 2) ? best : "";
}

class Validator {
 public:
  void check_keys(const json& obj, const std::string& where,
                  const std::vector<std::string>& known) {
    for (const auto& [key, value] : obj.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        const std::string hint = nearest_key(key, known);
        std::string msg = "unknown key '" + where + key + "'";
        if (!hint.empty()) msg += " (did you mean '" + hint + "'?)";
        errors.push_back(msg);
      }
    }
  }

  void require(bool ok, const std::string& message) {
    if (!ok) errors.push_back(message);
  }

  void finish() const {
    if (errors.empty()) return;
    std::ostringstream out;
    out << "invalid config (" << errors.size() << " problem" << (errors.size() > 1 ? "s" : "")
        << "):";
    for (const std::string& e : errors) out << "\n  - " << e;
    throw config_error(out.str());
  }

  std::vector<std::string> errors;
};

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return obj.at(key).get<T>();
}

std::vector<std::size_t> parse_values(const json& node, Validator& v, const std::string& where) {
  std::vector<std::size_t> values;
  if (node.is_array()) {
    for (const auto& x : node) values.push_back(x.get<std::size_t>());
  } else if (node.is_object()) {
    v.check_keys(node, where + ".", {"from", "to", "step"});
    if (node.contains("from") && node.contains("to")) {
      values = sweep::expand_range(node.at("from").get<std::size_t>(),
                                   node.at("to").get<std::size_t>(),
                                   get_or<std::size_t>(node, "step", 1));
    } else {
      v.require(false, where + " range needs 'from' and 'to'");
    }
  } else {
    v.require(false, where + " must be an array or a {from,to,step} range");
  }
  return values;
}

ExperimentConfig from_json(const json& root) {
  Validator v;
  v.check_keys(root, "", {"profile", "output_dir", "scenario", "data", "model", "train", "sweep"});

  ExperimentConfig cfg;
  try {
    cfg.profile = profile_from_string(get_or<std::string>(root, "profile", "desk"));
  } catch (const config_error& e) {
    v.errors.push_back(e.what());
  }
  const bool desk = cfg.profile == Profile::desk;
  cfg.output_dir = get_or<std::string>(root, "output_dir", "out");

  // scenario block
  if (!root.contains("scenario")) {
    v.require(false, "missing 'scenario' block");
    v.finish();
  }
  const json& scenario = root.at("scenario");
  v.check_keys(scenario, "scenario.",
               {"kind", "p", "snr_db", "sar_db", "shift_s", "noise_p", "noise_snr_db", "real"});
  try {
    cfg.scenario.scenario = datagen::scenario_from_string(get_or<std::string>(scenario, "kind", ""));
  } catch (const std::exception& e) {
    v.errors.push_back(std::string("scenario.kind: ") + e.what());
  }
  cfg.scenario.probability = get_or<double>(scenario, "p", 0.0);
  cfg.scenario.snr_db = get_or<double>(scenario, "snr_db", 0.0);
  cfg.scenario.sar_db = get_or<double>(scenario, "sar_db", 0.0);
  cfg.scenario.shift_scale = get_or<double>(scenario, "shift_s", 0.0);
  cfg.scenario.shift_noise_p = get_or<double>(scenario, "noise_p", 0.0);
  cfg.scenario.shift_noise_snr_db = get_or<double>(scenario, "noise_snr_db", 0.0);
  v.require(cfg.scenario.probability >= 0.0 && cfg.scenario.probability <= 1.0,
            "scenario.p must lie in [0, 1]");
  v.require(cfg.scenario.shift_scale >= 0.0, "scenario.shift_s must be nonnegative");

  const bool real = scenario.contains("real");
  if (real) {
    const json& rd = scenario.at("real");
    v.check_keys(rd, "scenario.real.",
                 {"csv", "batch_column", "label_column", "feature_columns", "delimiter",
                  "top_features", "source_batch", "n_train"});
    RealDataBlock block;
    block.csv_path = get_or<std::string>(rd, "csv", "");
    v.require(!block.csv_path.empty(), "scenario.real.csv is required for the real-data path");
    if (rd.contains("batch_column")) block.batch_column = rd.at("batch_column").get<std::string>();
    if (rd.contains("label_column")) block.label_column = rd.at("label_column").get<std::string>();
    block.feature_columns = get_or<std::vector<std::string>>(rd, "feature_columns", {});
    block.delimiter = get_or<std::string>(rd, "delimiter", ",");
    v.require(block.delimiter.size() == 1, "scenario.real.delimiter must be one character");
    block.top_features = get_or<std::size_t>(rd, "top_features", 1000);
    block.source_batch = get_or<std::string>(rd, "source_batch", "");
    block.n_train = get_or<std::size_t>(rd, "n_train", 5000);
    cfg.real = block;
  }

  // data block (synthetic subspace)
  const json data = root.contains("data") ? root.at("data") : json::object();
  v.check_keys(data, "data.", {"latent_dim", "ambient_dim", "n_train", "n_test", "seed"});
  cfg.data.latent_dim = get_or<std::size_t>(data, "latent_dim", 20);
  cfg.data.ambient_dim = get_or<std::size_t>(data, "ambient_dim", 50);
  cfg.data.n_train = get_or<std::size_t>(data, "n_train", desk ? 2000 : 5000);
  cfg.data.n_test = get_or<std::size_t>(data, "n_test", desk ? 2000 : 10000);
  cfg.data.seed = get_or<std::uint64_t>(data, "seed", 1);
  v.require(cfg.data.latent_dim >= 1, "data.latent_dim must be positive");
  v.require(cfg.data.ambient_dim > cfg.data.latent_dim,
            "data.ambient_dim must exceed data.latent_dim");
  v.require(cfg.data.n_train >= 1 && cfg.data.n_test >= 1,
            "data.n_train and data.n_test must be at least 1");

  // sweep block first: axis informs other defaults
  const json sweep_block = root.contains("sweep") ? root.at("sweep") : json::object();
  v.check_keys(sweep_block, "sweep.",
               {"axis", "values", "grid_bottlenecks", "seeds", "parallelism", "save_embeddings",
                "save_models"});
  try {
    cfg.axis = sweep::axis_from_string(get_or<std::string>(sweep_block, "axis", "hidden_dim"));
  } catch (const std::exception& e) {
    v.errors.push_back(std::string("sweep.axis: ") + e.what());
  }
  if (sweep_block.contains("values")) {
    cfg.axis_values = parse_values(sweep_block.at("values"), v, "sweep.values");
  } else if (cfg.axis == sweep::Axis::hidden_dim || cfg.axis == sweep::Axis::grid) {
    cfg.axis_values = desk ? sweep::expand_range(4, 200, 8) : sweep::expand_range(4, 500, 4);
  } else if (cfg.axis == sweep::Axis::bottleneck_dim) {
    cfg.axis_values = sweep::expand_range(1, std::min<std::size_t>(cfg.data.ambient_dim - 1, 45), 2);
  } else if (cfg.axis == sweep::Axis::n_train) {
    cfg.axis_values = desk ? std::vector<std::size_t>{250, 500, 1000, 2000, 4000}
                           : std::vector<std::size_t>{500, 1000, 2000, 5000, 10000};
  }
  if (sweep_block.contains("grid_bottlenecks")) {
    cfg.grid_bottlenecks = parse_values(sweep_block.at("grid_bottlenecks"), v, "sweep.grid_bottlenecks");
  } else if (cfg.axis == sweep::Axis::grid) {
    cfg.grid_bottlenecks = {25, 30, 45};
  }
  cfg.seeds = get_or<std::vector<std::uint64_t>>(sweep_block, "seeds",
                                                 desk ? std::vector<std::uint64_t>{1, 2, 3}
                                                      : std::vector<std::uint64_t>{1, 2, 3, 4, 5});
  v.require(!cfg.seeds.empty(), "sweep.seeds must contain at least one seed");
  cfg.parallelism = get_or<std::size_t>(sweep_block, "parallelism", 0);
  cfg.save_embeddings = get_or<bool>(sweep_block, "save_embeddings", false);
  cfg.save_models = get_or<bool>(sweep_block, "save_models", false);
  std::set<std::size_t> unique_values(cfg.axis_values.begin(), cfg.axis_values.end());
  if (cfg.axis != sweep::Axis::epochs) {
    v.require(!cfg.axis_values.empty(), "sweep.values must be non-empty");
    v.require(unique_values.size() == cfg.axis_values.size(),
              "sweep.values must not contain duplicates");
    for (std::size_t x : cfg.axis_values) {
      v.require(x >= 1, "sweep.values must be positive");
    }
  }

  // model block
  const json model = root.contains("model") ? root.at("model") : json::object();
  v.check_keys(model, "model.", {"hidden_dim", "bottleneck_dim", "activation"});
  cfg.model.hidden_dim = get_or<std::size_t>(model, "hidden_dim", 100);
  cfg.model.bottleneck_dim = get_or<std::size_t>(model, "bottleneck_dim", cfg.real ? 300 : 25);
  try {
    cfg.model.activation = nn::activation_from_string(get_or<std::string>(model, "activation", "relu"));
  } catch (const std::exception& e) {
    v.errors.push_back(std::string("model.activation: ") + e.what());
  }
  const std::size_t input_dim = cfg.real ? cfg.real->top_features : cfg.data.ambient_dim;
  cfg.model.input_dim = input_dim;
  v.require(cfg.model.hidden_dim >= 1, "model.hidden_dim must be positive");
  v.require(cfg.model.bottleneck_dim >= 1, "model.bottleneck_dim must be positive");
  if (cfg.axis != sweep::Axis::bottleneck_dim && cfg.axis != sweep::Axis::grid) {
    v.require(cfg.model.bottleneck_dim < input_dim,
              "model.bottleneck_dim must be smaller than the input width (under-complete)");
  } else {
    for (std::size_t b : (cfg.axis == sweep::Axis::grid ? cfg.grid_bottlenecks : cfg.axis_values)) {
      v.require(b < input_dim,
                "bottleneck value " + std::to_string(b) +
                    " must be smaller than the input width (under-complete)");
    }
  }

  // train block
  const json train = root.contains("train") ? root.at("train") : json::object();
  v.check_keys(train, "train.",
               {"learning_rate", "epochs", "batch_size", "shuffle_each_epoch", "eval_period"});
  cfg.train.learning_rate = get_or<double>(train, "learning_rate", 0.001);
  cfg.train.epochs = get_or<std::size_t>(
      train, "epochs", cfg.real ? 1000 : (desk ? std::size_t{100} : std::size_t{200}));
  cfg.train.batch_size = get_or<std::size_t>(train, "batch_size", cfg.real ? 128 : 10);
  cfg.train.shuffle_each_epoch = get_or<bool>(train, "shuffle_each_epoch", true);
  cfg.train.eval_period = get_or<std::size_t>(
      train, "eval_period", cfg.axis == sweep::Axis::epochs ? std::size_t{1} : std::size_t{10});
  v.require(cfg.train.learning_rate > 0.0, "train.learning_rate must be positive");
  v.require(cfg.train.epochs >= 1, "train.epochs must be positive");
  v.require(cfg.train.batch_size >= 1, "train.batch_size must be positive");
  v.require(cfg.train.eval_period >= 1, "train.eval_period must be positive");

  v.finish();
  return cfg;
}

}  // namespace

ExperimentConfig validate_config_text(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw config_error("config root must be a JSON object");
  try {
    return from_json(root);
  } catch (const json::exception& e) {
    throw config_error(std::string("config type error: ") + e.what());
  }
}

ExperimentConfig validate_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return validate_config_text(buffer.str());
}

std::string emit_config(const ExperimentConfig& cfg) {
  json root;
  root["profile"] = to_string(cfg.profile);
  root["output_dir"] = cfg.output_dir;
  json scenario;
  scenario["kind"] = datagen::to_string(cfg.scenario.scenario);
  scenario["p"] = cfg.scenario.probability;
  scenario["snr_db"] = cfg.scenario.snr_db;
  scenario["sar_db"] = cfg.scenario.sar_db;
  scenario["shift_s"] = cfg.scenario.shift_scale;
  scenario["noise_p"] = cfg.scenario.shift_noise_p;
  scenario["noise_snr_db"] = cfg.scenario.shift_noise_snr_db;
  if (cfg.real) {
    json rd;
    rd["csv"] = cfg.real->csv_path;
    if (cfg.real->batch_column) rd["batch_column"] = *cfg.real->batch_column;
    if (cfg.real->label_column) rd["label_column"] = *cfg.real->label_column;
    rd["feature_columns"] = cfg.real->feature_columns;
    rd["delimiter"] = cfg.real->delimiter;
    rd["top_features"] = cfg.real->top_features;
    rd["source_batch"] = cfg.real->source_batch;
    rd["n_train"] = cfg.real->n_train;
    scenario["real"] = rd;
  }
  root["scenario"] = scenario;
  root["data"] = {{"latent_dim", cfg.data.latent_dim},
                  {"ambient_dim", cfg.data.ambient_dim},
                  {"n_train", cfg.data.n_train},
                  {"n_test", cfg.data.n_test},
                  {"seed", cfg.data.seed}};
  root["model"] = {{"hidden_dim", cfg.model.hidden_dim},
                   {"bottleneck_dim", cfg.model.bottleneck_dim},
                   {"activation", nn::to_string(cfg.model.activation)}};
  root["train"] = {{"learning_rate", cfg.train.learning_rate},
                   {"epochs", cfg.train.epochs},
                   {"batch_size", cfg.train.batch_size},
                   {"shuffle_each_epoch", cfg.train.shuffle_each_epoch},
                   {"eval_period", cfg.train.eval_period}};
  json sweep_block;
  sweep_block["axis"] = sweep::to_string(cfg.axis);
  sweep_block["values"] = cfg.axis_values;
  if (!cfg.grid_bottlenecks.empty()) sweep_block["grid_bottlenecks"] = cfg.grid_bottlenecks;
  sweep_block["seeds"] = cfg.seeds;
  sweep_block["parallelism"] = cfg.parallelism;
  sweep_block["save_embeddings"] = cfg.save_embeddings;
  sweep_block["save_models"] = cfg.save_models;
  root["sweep"] = sweep_block;
  return root.dump(2) + "\n";
}

sweep::SweepSpec to_sweep_spec(const ExperimentConfig& cfg) {
  sweep::SweepSpec spec;
  spec.axis = cfg.axis;
  spec.axis_values = cfg.axis_values;
  spec.grid_bottlenecks = cfg.grid_bottlenecks;
  spec.data = cfg.data;
  spec.scenario = cfg.scenario;
  spec.base_arch = cfg.model;
  spec.base_arch.input_dim = cfg.data.ambient_dim;
  spec.train = cfg.train;
  spec.seeds = cfg.seeds;
  spec.parallelism = cfg.parallelism;
  spec.capture_embeddings = cfg.save_embeddings;
  spec.capture_models = cfg.save_models;
  return spec;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return emit_config(a) == emit_config(b);
}

}  // namespace descentlab::config
