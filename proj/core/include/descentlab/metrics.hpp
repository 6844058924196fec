#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "descentlab/autoencoder.hpp"
#include "descentlab/matrix.hpp"

namespace descentlab::metrics {

// Post-training loss normalization: raw MSE divided by the variance of the
// reference dataset around its scalar mean, pooled over all entries.
struct LossNormalizer {
  double mean = 0.0;
  double denominator = 0.0;
};

// Throws std::invalid_argument when the dataset is constant (zero variance).
LossNormalizer make_loss_normalizer(const Matrix& reference);

double normalized_loss(double raw_mse, const LossNormalizer& normalizer);

struct ScoredSample {
  double score = 0.0;  // per-sample mean squared reconstruction error
  bool is_anomaly = false;
};

// Per-row reconstruction error of `data` under `model`, labeled by `labels`.
std::vector<ScoredSample> reconstruction_scores(const nn::AutoencoderModel& model,
                                                const Matrix& data,
                                                const std::vector<bool>& labels);

// Probability that a random anomaly outscores a random clean sample, ties
// half (Mann-Whitney rank statistic). Requires both labels present.
double roc_auc(const std::vector<ScoredSample>& scored);

struct KnnDatConfig {
  std::size_t k = 10;
  std::size_t threads = 0;  // 0: use hardware/DESCENTLAB_THREADS default
};

// Mean fraction of each point's k Euclidean nearest neighbors (self
// excluded, ties by lower index) sharing the point's batch label.
// 1 means fully separated batches, ~0.5 fully mixed equal-size batches.
double knn_dat(const Matrix& embeddings, const std::vector<int>& batch_labels,
               const KnnDatConfig& cfg = {});

struct Extremum {
  std::size_t index = 0;
  double x = 0.0;
  double value = 0.0;
  bool is_maximum = false;
};

struct PeakProfile {
  std::vector<Extremum> extrema;       // interior strict extrema, in order
  std::optional<double> first_min;     // smallest smoothed value before the peak
  std::optional<double> peak;          // highest interior local maximum
  std::optional<double> second_min;    // smallest smoothed value after the peak
  std::size_t descent_count = 0;       // maximal strictly-decreasing runs
  std::vector<double> smoothed;
};

// Mechanical descent detector: smooths y with a centered moving average
// (window 3 by default, 1 disables smoothing), then scans for strict local
// extrema and counts descent segments. 2 descents = double descent.
PeakProfile peak_profile(const std::vector<double>& x, const std::vector<double>& y,
                         std::size_t smooth_window = 3);

}  // namespace descentlab::metrics
