#include "descentlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace descentlab::metrics {

LossNormalizer make_loss_normalizer(const Matrix& reference) {
  if (reference.empty()) throw std::invalid_argument("normalizer reference is empty");
  const double n = static_cast<double>(reference.size());
  double mean = 0.0;
  for (double v : reference.storage()) mean += v;
  mean /= n;
  double denom = 0.0;
  for (double v : reference.storage()) {
    const double d = v - mean;
    denom += d * d;
  }
  denom /= n;
  if (denom <= 0.0) {
    throw std::invalid_argument("normalization undefined for a constant dataset");
  }
  return {mean, denom};
}

double normalized_loss(double raw_mse, const LossNormalizer& normalizer) {
  if (normalizer.denominator <= 0.0) {
    throw std::invalid_argument("normalization undefined for a constant dataset");
  }
  return raw_mse / normalizer.denominator;
}

std::vector<ScoredSample> reconstruction_scores(const nn::AutoencoderModel& model,
                                                const Matrix& data,
                                                const std::vector<bool>& labels) {
  if (labels.size() != data.rows()) {
    throw std::invalid_argument("labels length must equal the number of rows");
  }
  std::vector<ScoredSample> scored(data.rows());
  const std::size_t block = 512;
  Matrix chunk;
  for (std::size_t start = 0; start < data.rows(); start += block) {
    const std::size_t rows = std::min(block, data.rows() - start);
    chunk = Matrix(rows, data.cols());
    std::copy_n(data.row(start), rows * data.cols(), chunk.data());
    const Matrix recon = nn::forward(model, chunk);
    for (std::size_t i = 0; i < rows; ++i) {
      const double* a = chunk.row(i);
      const double* b = recon.row(i);
      double total = 0.0;
      for (std::size_t j = 0; j < data.cols(); ++j) {
        const double d = a[j] - b[j];
        total += d * d;
      }
      scored[start + i] = {total / static_cast<double>(data.cols()), labels[start + i]};
    }
  }
  return scored;
}

double roc_auc(const std::vector<ScoredSample>& scored) {
  std::size_t n_pos = 0;
  for (const auto& s : scored) n_pos += s.is_anomaly ? 1 : 0;
  const std::size_t n_neg = scored.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("roc_auc requires both clean and anomaly samples");
  }

  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scored[a].score < scored[b].score; });

  // Sum of anomaly ranks with average ranks over ties, held as 2*rank so the
  // accumulation stays integral and exact.
  std::uint64_t twice_rank_sum = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scored[order[j]].score == scored[order[i]].score) ++j;
    // Ranks are 1-based; the tied block occupies ranks i+1 .. j, whose
    // average is (i+1+j)/2, i.e. twice-rank i+1+j.
    const std::uint64_t twice_avg_rank = static_cast<std::uint64_t>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (scored[order[t]].is_anomaly) twice_rank_sum += twice_avg_rank;
    }
    i = j;
  }
  const std::uint64_t p = n_pos;
  const double u = static_cast<double>(twice_rank_sum - p * (p + 1));
  return u / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

namespace {

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DESCENTLAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Fraction of the k nearest neighbors of `point` sharing its batch label.
double same_batch_fraction(const Matrix& emb, const std::vector<int>& labels, std::size_t point,
                           std::size_t k) {
  const std::size_t m = emb.rows();
  const std::size_t dim = emb.cols();
  // (squared distance, index) pairs; index tiebreak keeps selection total.
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(m - 1);
  const double* p = emb.row(point);
  for (std::size_t j = 0; j < m; ++j) {
    if (j == point) continue;
    const double* q = emb.row(j);
    double d2 = 0.0;
    for (std::size_t t = 0; t < dim; ++t) {
      const double diff = p[t] - q[t];
      d2 += diff * diff;
    }
    dist.emplace_back(d2, j);
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::size_t same = 0;
  for (std::size_t t = 0; t < k; ++t) {
    if (labels[dist[t].second] == labels[point]) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(k);
}

}  // namespace

double knn_dat(const Matrix& embeddings, const std::vector<int>& batch_labels,
               const KnnDatConfig& cfg) {
  const std::size_t m = embeddings.rows();
  if (batch_labels.size() != m) {
    throw std::invalid_argument("batch_labels length must equal the number of embeddings");
  }
  if (cfg.k == 0 || cfg.k >= m) {
    throw std::invalid_argument("knn_dat requires 0 < k < number of points (k=" +
                                std::to_string(cfg.k) + ", M=" + std::to_string(m) + ")");
  }

  std::vector<double> fractions(m, 0.0);
  const std::size_t n_threads = std::min(resolve_threads(cfg.threads), m);
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < m; ++i) {
      fractions[i] = same_batch_fraction(embeddings, batch_labels, i, cfg.k);
    }
  } else {
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (std::size_t w = 0; w < n_threads; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < m; i += n_threads) {
          fractions[i] = same_batch_fraction(embeddings, batch_labels, i, cfg.k);
        }
      });
    }
    for (auto& t : workers) t.join();
  }
  // Sequential reduction keeps the result independent of thread scheduling.
  double total = 0.0;
  for (double f : fractions) total += f;
  return total / static_cast<double>(m);
}

PeakProfile peak_profile(const std::vector<double>& x, const std::vector<double>& y,
                         std::size_t smooth_window) {
  if (x.size() != y.size()) throw std::invalid_argument("peak_profile: x/y length mismatch");
  if (x.size() < 5) throw std::invalid_argument("peak_profile requires at least 5 points");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw std::invalid_argument("peak_profile: x must be strictly increasing");
  }
  if (smooth_window % 2 == 0) throw std::invalid_argument("smooth_window must be odd");

  const std::size_t n = y.size();
  const std::size_t half = smooth_window / 2;
  PeakProfile profile;
  profile.smoothed.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(i + half, n - 1);
    double acc = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) acc += y[j];
    profile.smoothed[i] = acc / static_cast<double>(hi - lo + 1);
  }
  const std::vector<double>& s = profile.smoothed;

  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (s[i] > s[i - 1] && s[i] > s[i + 1]) {
      profile.extrema.push_back({i, x[i], s[i], true});
    } else if (s[i] < s[i - 1] && s[i] < s[i + 1]) {
      profile.extrema.push_back({i, x[i], s[i], false});
    }
  }

  bool in_descent = false;
  for (std::size_t i = 1; i < n; ++i) {
    if (s[i] < s[i - 1]) {
      if (!in_descent) {
        ++profile.descent_count;
        in_descent = true;
      }
    } else if (s[i] > s[i - 1]) {
      in_descent = false;
    }
  }

  const auto peak_it =
      std::max_element(profile.extrema.begin(), profile.extrema.end(),
                       [](const Extremum& a, const Extremum& b) {
                         if (a.is_maximum != b.is_maximum) return !a.is_maximum;
                         return a.value < b.value;
                       });
  if (peak_it != profile.extrema.end() && peak_it->is_maximum) {
    profile.peak = peak_it->value;
    const std::size_t pi = peak_it->index;
    profile.first_min = *std::min_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(pi));
    profile.second_min =
        *std::min_element(s.begin() + static_cast<std::ptrdiff_t>(pi) + 1, s.end());
  }
  return profile;
}

}  // namespace descentlab::metrics
