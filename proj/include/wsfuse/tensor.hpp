#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wsfuse/errors.hpp"

namespace wsfuse {

// Dense row-major matrix of doubles; the only numeric container in the
// project. Rows are samples unless stated otherwise.
class Tensor2 {
 public:
  Tensor2() = default;
  Tensor2(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Tensor2(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw ShapeError("Tensor2: data length != rows*cols");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// a (m x k) * b (k x n) -> (m x n)
Tensor2 matmul(const Tensor2& a, const Tensor2& b);
// aT (k x m) * b (k x n) -> (m x n), i.e. matmul(transpose(a), b) without the copy
Tensor2 matmul_at_b(const Tensor2& a, const Tensor2& b);
// a (m x k) * bT (n x k) -> (m x n)
Tensor2 matmul_a_bt(const Tensor2& a, const Tensor2& b);

// gather rows by index (indices must be < m.rows())
Tensor2 select_rows(const Tensor2& m, std::span<const std::size_t> idx);

}  // namespace wsfuse
