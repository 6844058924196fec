#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace descentlab {

// Dense row-major matrix of doubles. Small on purpose: the handful of
// kernels the training loop needs, nothing more.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }
  std::span<const double> row_span(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  // First `n` rows as a copy.
  Matrix top_rows(std::size_t n) const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// out = a * b^T     (a: m×k, b: n×k, out: m×n)
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out);
// out = a * b       (a: m×k, b: k×n, out: m×n)
void matmul_nn(const Matrix& a, const Matrix& b, Matrix& out);
// out += a^T * b    (a: m×k, b: m×n, out: k×n)
void matmul_tn_acc(const Matrix& a, const Matrix& b, Matrix& out);

// Adds `bias` (length = cols) to every row.
void add_row_bias(Matrix& m, std::span<const double> bias);

bool all_finite(const Matrix& m);
bool all_finite(std::span<const double> v);

}  // namespace descentlab
