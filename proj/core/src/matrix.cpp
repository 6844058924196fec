#include "descentlab/matrix.hpp"

#include <cassert>
#include <cmath>
#include <cstring>

namespace descentlab {

Matrix Matrix::top_rows(std::size_t n) const {
  assert(n <= rows_);
  Matrix out(n, cols_);
  std::memcpy(out.data(), data(), n * cols_ * sizeof(double));
  return out;
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out) {
  assert(a.cols() == b.cols());
  const std::size_t m = a.rows(), n = b.rows(), k = a.cols();
  if (out.rows() != m || out.cols() != n) out = Matrix(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a.row(i);
    double* oi = out.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double* bj = b.row(j);
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += ai[t] * bj[t];
      oi[j] = acc;
    }
  }
}

void matmul_nn(const Matrix& a, const Matrix& b, Matrix& out) {
  assert(a.cols() == b.rows());
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (out.rows() != m || out.cols() != n) out = Matrix(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a.row(i);
    double* oi = out.row(i);
    for (std::size_t j = 0; j < n; ++j) oi[j] = 0.0;
    for (std::size_t t = 0; t < k; ++t) {
      const double ait = ai[t];
      if (ait == 0.0) continue;
      const double* bt = b.row(t);
      for (std::size_t j = 0; j < n; ++j) oi[j] += ait * bt[j];
    }
  }
}

void matmul_tn_acc(const Matrix& a, const Matrix& b, Matrix& out) {
  assert(a.rows() == b.rows());
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (out.rows() != k || out.cols() != n) out = Matrix(k, n);
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a.row(i);
    const double* bi = b.row(i);
    for (std::size_t t = 0; t < k; ++t) {
      const double ait = ai[t];
      if (ait == 0.0) continue;
      double* ot = out.row(t);
      for (std::size_t j = 0; j < n; ++j) ot[j] += ait * bi[j];
    }
  }
}

void add_row_bias(Matrix& m, std::span<const double> bias) {
  assert(bias.size() == m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double* ri = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) ri[j] += bias[j];
  }
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

bool all_finite(const Matrix& m) { return all_finite(std::span<const double>(m.storage())); }

}  // namespace descentlab
