#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "descentlab/matrix.hpp"

namespace descentlab::realdata {

struct TabularDataset {
  Matrix matrix;                         // N × n
  std::vector<int> batch_labels;         // dense ids, 0..B-1
  std::vector<std::string> batch_names;  // id -> original label
  std::optional<std::vector<bool>> anomaly_flags;
  std::vector<std::string> feature_names;
  std::size_t skipped_rows = 0;

  std::size_t n_samples() const { return matrix.rows(); }
  std::size_t n_features() const { return matrix.cols(); }
};

struct CsvSchema {
  // Empty: every column except batch/label columns is a feature.
  std::vector<std::string> feature_columns;
  std::optional<std::string> batch_column;
  std::optional<std::string> label_column;  // nonzero value marks an anomaly
  char delimiter = ',';
  bool strict = true;
};

// Ingests a delimiter-separated file with a header row. Rows with
// unparsable numbers are an error in strict mode and a counted skip
// otherwise. Batch labels intern to dense integers in first-seen order.
TabularDataset load_csv(const std::string& path, const CsvSchema& schema);

// Keeps the k features with the largest sample variance (ties broken by
// original column index), preserving original column order.
TabularDataset select_top_features(const TabularDataset& ds, std::size_t k);

struct NoiseOutcome {
  bool applied = false;  // false when the row had zero norm
};

// x + (|x|/|v|) * v / theta with Gaussian v: the added-noise norm is exactly
// |x| / theta, so the per-sample amplitude SNR is exactly theta.
NoiseOutcome real_noise_vector(std::vector<double>& x, double snr_db, std::uint64_t seed);
NoiseOutcome real_noise_row(Matrix& m, std::size_t row, double snr_db, std::uint64_t seed);

struct RealNoiseReport {
  std::size_t noised_rows = 0;
  std::size_t skipped_zero_norm = 0;
  std::vector<std::uint8_t> feature_mask;  // feature mode only
};

// Per-row Bernoulli(p) selection of rows to noise with the norm-based recipe.
RealNoiseReport apply_real_sample_noise(TabularDataset& ds, double probability, double snr_db,
                                        std::uint64_t seed);

// Noises a fixed floor(n*p) feature subset of every row; the noise vector is
// supported on the masked coordinates only, then scaled by the same
// norm-based rule.
RealNoiseReport apply_real_feature_noise(TabularDataset& ds, double probability, double snr_db,
                                         std::uint64_t seed);

struct SourceTargetSplit {
  TabularDataset source;
  std::map<int, TabularDataset> targets;  // batch id -> rows, original order
};

SourceTargetSplit split_source_target(const TabularDataset& ds, int source_batch);

// Seeded shuffle then head/tail split; labels and flags follow their rows.
struct TabularSplit {
  TabularDataset train;
  TabularDataset test;
};
TabularSplit shuffled_split(const TabularDataset& ds, std::size_t n_train, std::uint64_t seed);

// Matrix-only view of the same split.
struct TrainTestRows {
  Matrix train;
  Matrix test;
};
TrainTestRows shuffled_train_test(const TabularDataset& ds, std::size_t n_train,
                                  std::uint64_t seed);

// Mirrors the ingested format; numeric fields use shortest round-trip form.
void export_csv(const TabularDataset& ds, const std::string& path, char delimiter = ',');

}  // namespace descentlab::realdata
