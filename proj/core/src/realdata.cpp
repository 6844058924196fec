#include "descentlab/realdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "descentlab/csv.hpp"
#include "descentlab/datagen.hpp"
#include "descentlab/rng.hpp"

namespace descentlab::realdata {

TabularDataset load_csv(const std::string& path, const CsvSchema& schema) {
  csv::ReadOptions opts;
  opts.delimiter = schema.delimiter;
  opts.strict = schema.strict;
  const csv::Table table = csv::read_file(path, opts);

  std::optional<std::size_t> batch_col;
  if (schema.batch_column) batch_col = table.column(*schema.batch_column);
  std::optional<std::size_t> label_col;
  if (schema.label_column) label_col = table.column(*schema.label_column);

  std::vector<std::size_t> feature_cols;
  if (schema.feature_columns.empty()) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (batch_col && c == *batch_col) continue;
      if (label_col && c == *label_col) continue;
      feature_cols.push_back(c);
    }
  } else {
    for (const std::string& name : schema.feature_columns) {
      feature_cols.push_back(table.column(name));
    }
  }
  if (feature_cols.empty()) throw std::invalid_argument("csv schema selects no feature columns");

  TabularDataset ds;
  ds.skipped_rows = table.skipped_rows;
  for (std::size_t c : feature_cols) ds.feature_names.push_back(table.header[c]);
  if (label_col) ds.anomaly_flags.emplace();

  std::unordered_map<std::string, int> batch_ids;
  std::vector<std::vector<double>> parsed;
  parsed.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::vector<double> values(feature_cols.size());
    bool ok = true;
    for (std::size_t i = 0; i < feature_cols.size(); ++i) {
      try {
        values[i] = csv::parse_double(row[feature_cols[i]], r + 2);
      } catch (const std::exception&) {
        if (schema.strict) throw;
        ok = false;
        break;
      }
    }
    if (!ok) {
      ++ds.skipped_rows;
      continue;
    }
    parsed.push_back(std::move(values));
    if (batch_col) {
      const std::string& label = row[*batch_col];
      const auto [it, inserted] = batch_ids.emplace(label, static_cast<int>(ds.batch_names.size()));
      if (inserted) ds.batch_names.push_back(label);
      ds.batch_labels.push_back(it->second);
    } else {
      ds.batch_labels.push_back(0);
    }
    if (label_col) {
      const std::string& v = row[*label_col];
      ds.anomaly_flags->push_back(!(v.empty() || v == "0" || v == "clean" || v == "false"));
    }
  }
  if (!batch_col) ds.batch_names.push_back("0");

  ds.matrix = Matrix(parsed.size(), feature_cols.size());
  for (std::size_t r = 0; r < parsed.size(); ++r) {
    std::copy(parsed[r].begin(), parsed[r].end(), ds.matrix.row(r));
  }
  return ds;
}

TabularDataset select_top_features(const TabularDataset& ds, std::size_t k) {
  const std::size_t n = ds.n_features();
  if (k == 0 || k > n) {
    throw std::invalid_argument("select_top_features: k must lie in [1, n_features]");
  }
  const std::size_t rows = ds.n_samples();
  std::vector<double> variance(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < rows; ++r) mean += ds.matrix(r, c);
    mean /= static_cast<double>(rows);
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double d = ds.matrix(r, c) - mean;
      acc += d * d;
    }
    variance[c] = acc / static_cast<double>(rows);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (variance[a] != variance[b]) return variance[a] > variance[b];
    return a < b;
  });
  std::vector<std::size_t> keep(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(keep.begin(), keep.end());  // preserve original column order

  TabularDataset out;
  out.batch_labels = ds.batch_labels;
  out.batch_names = ds.batch_names;
  out.anomaly_flags = ds.anomaly_flags;
  out.skipped_rows = ds.skipped_rows;
  out.matrix = Matrix(rows, k);
  for (std::size_t i = 0; i < k; ++i) out.feature_names.push_back(ds.feature_names[keep[i]]);
  for (std::size_t r = 0; r < rows; ++r) {
    double* dst = out.matrix.row(r);
    const double* src = ds.matrix.row(r);
    for (std::size_t i = 0; i < k; ++i) dst[i] = src[keep[i]];
  }
  return out;
}

namespace {

NoiseOutcome noise_span(double* x, std::size_t n, double snr_db, Rng& rng) {
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) norm_sq += x[i] * x[i];
  if (norm_sq <= 0.0) return {false};
  const double theta = datagen::db_to_linear(snr_db);
  std::vector<double> v(n);
  double v_norm_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = rng.next_normal();
    v_norm_sq += v[i] * v[i];
  }
  const double factor = std::sqrt(norm_sq / v_norm_sq) / theta;
  for (std::size_t i = 0; i < n; ++i) x[i] += factor * v[i];
  return {true};
}

}  // namespace

NoiseOutcome real_noise_vector(std::vector<double>& x, double snr_db, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, streams::real_noise);
  return noise_span(x.data(), x.size(), snr_db, rng);
}

NoiseOutcome real_noise_row(Matrix& m, std::size_t row, double snr_db, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, streams::real_noise);
  return noise_span(m.row(row), m.cols(), snr_db, rng);
}

RealNoiseReport apply_real_sample_noise(TabularDataset& ds, double probability, double snr_db,
                                        std::uint64_t seed) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw std::invalid_argument("probability must lie in [0, 1]");
  }
  RealNoiseReport report;
  Rng rng = Rng::substream(seed, streams::real_noise);
  for (std::size_t r = 0; r < ds.n_samples(); ++r) {
    if (!rng.next_bernoulli(probability)) continue;
    const NoiseOutcome outcome = noise_span(ds.matrix.row(r), ds.n_features(), snr_db, rng);
    if (outcome.applied) {
      ++report.noised_rows;
    } else {
      ++report.skipped_zero_norm;
    }
  }
  return report;
}

RealNoiseReport apply_real_feature_noise(TabularDataset& ds, double probability, double snr_db,
                                         std::uint64_t seed) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw std::invalid_argument("probability must lie in [0, 1]");
  }
  const std::size_t n = ds.n_features();
  const std::size_t n_noisy =
      static_cast<std::size_t>(std::floor(static_cast<double>(n) * probability));
  RealNoiseReport report;
  report.feature_mask.assign(n, 0);
  if (n_noisy == 0) return report;

  Rng mask_rng = Rng::substream(seed, streams::feature_mask);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < n_noisy; ++i) {
    const std::size_t j = i + mask_rng.next_below(n - i);
    std::swap(idx[i], idx[j]);
  }
  for (std::size_t i = 0; i < n_noisy; ++i) report.feature_mask[idx[i]] = 1;

  const double theta = datagen::db_to_linear(snr_db);
  Rng rng = Rng::substream(seed, streams::real_noise);
  std::vector<double> v(n_noisy);
  for (std::size_t r = 0; r < ds.n_samples(); ++r) {
    double* row = ds.matrix.row(r);
    double norm_sq = 0.0;
    for (std::size_t c = 0; c < n; ++c) norm_sq += row[c] * row[c];
    if (norm_sq <= 0.0) {
      ++report.skipped_zero_norm;
      continue;
    }
    double v_norm_sq = 0.0;
    for (std::size_t i = 0; i < n_noisy; ++i) {
      v[i] = rng.next_normal();
      v_norm_sq += v[i] * v[i];
    }
    const double factor = std::sqrt(norm_sq / v_norm_sq) / theta;
    std::size_t vi = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (report.feature_mask[c]) row[c] += factor * v[vi++];
    }
    ++report.noised_rows;
  }
  return report;
}

SourceTargetSplit split_source_target(const TabularDataset& ds, int source_batch) {
  const auto present = std::find(ds.batch_labels.begin(), ds.batch_labels.end(), source_batch);
  if (present == ds.batch_labels.end()) {
    throw std::invalid_argument("source batch id " + std::to_string(source_batch) +
                                " not present in dataset");
  }
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < ds.n_samples(); ++r) groups[ds.batch_labels[r]].push_back(r);

  const auto subset = [&](const std::vector<std::size_t>& rows) {
    TabularDataset sub;
    sub.feature_names = ds.feature_names;
    sub.batch_names = ds.batch_names;
    sub.matrix = Matrix(rows.size(), ds.n_features());
    if (ds.anomaly_flags) sub.anomaly_flags.emplace();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::memcpy(sub.matrix.row(i), ds.matrix.row(rows[i]), ds.n_features() * sizeof(double));
      sub.batch_labels.push_back(ds.batch_labels[rows[i]]);
      if (ds.anomaly_flags) sub.anomaly_flags->push_back((*ds.anomaly_flags)[rows[i]]);
    }
    return sub;
  };

  SourceTargetSplit split;
  split.source = subset(groups.at(source_batch));
  for (const auto& [id, rows] : groups) {
    if (id == source_batch) continue;
    split.targets.emplace(id, subset(rows));
  }
  return split;
}

TabularSplit shuffled_split(const TabularDataset& ds, std::size_t n_train, std::uint64_t seed) {
  const std::size_t rows = ds.n_samples();
  if (n_train == 0 || n_train >= rows) {
    throw std::invalid_argument("n_train must lie in [1, n_samples)");
  }
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = Rng::substream(seed, streams::real_split);
  for (std::size_t i = rows; i > 1; --i) {
    std::swap(order[i - 1], order[rng.next_below(i)]);
  }
  const auto gather = [&](std::size_t begin, std::size_t end) {
    TabularDataset out;
    out.feature_names = ds.feature_names;
    out.batch_names = ds.batch_names;
    if (ds.anomaly_flags) out.anomaly_flags.emplace();
    out.matrix = Matrix(end - begin, ds.n_features());
    for (std::size_t i = begin; i < end; ++i) {
      std::memcpy(out.matrix.row(i - begin), ds.matrix.row(order[i]),
                  ds.n_features() * sizeof(double));
      out.batch_labels.push_back(ds.batch_labels[order[i]]);
      if (ds.anomaly_flags) out.anomaly_flags->push_back((*ds.anomaly_flags)[order[i]]);
    }
    return out;
  };
  return {gather(0, n_train), gather(n_train, rows)};
}

TrainTestRows shuffled_train_test(const TabularDataset& ds, std::size_t n_train,
                                  std::uint64_t seed) {
  TabularSplit split = shuffled_split(ds, n_train, seed);
  return {std::move(split.train.matrix), std::move(split.test.matrix)};
}

void export_csv(const TabularDataset& ds, const std::string& path, char delimiter) {
  csv::Table table;
  table.header = ds.feature_names;
  const bool has_batches = ds.batch_names.size() > 1 || !ds.batch_labels.empty();
  if (has_batches) table.header.push_back("batch");
  if (ds.anomaly_flags) table.header.push_back("label");
  table.rows.reserve(ds.n_samples());
  for (std::size_t r = 0; r < ds.n_samples(); ++r) {
    std::vector<std::string> row;
    row.reserve(table.header.size());
    for (std::size_t c = 0; c < ds.n_features(); ++c) {
      row.push_back(csv::format_double(ds.matrix(r, c)));
    }
    if (has_batches) row.push_back(ds.batch_names[static_cast<std::size_t>(ds.batch_labels[r])]);
    if (ds.anomaly_flags) row.push_back((*ds.anomaly_flags)[r] ? "1" : "0");
    table.rows.push_back(std::move(row));
  }
  csv::write_file(path, table, delimiter);
}

}  // namespace descentlab::realdata
