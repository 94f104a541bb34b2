#include "wsfuse/tensor.hpp"

#include <cmath>
#include <string>

namespace wsfuse {

bool Tensor2::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: " + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()));
  Tensor2 out(a.rows(), b.cols());
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  for (std::size_t i = 0; i < m; ++i) {
    const double* ar = a.data().data() + i * k;
    double* or_ = out.data().data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ar[p];
      if (av == 0.0) continue;
      const double* br = b.data().data() + p * n;
      for (std::size_t j = 0; j < n; ++j) or_[j] += av * br[j];
    }
  }
  return out;
}

Tensor2 matmul_at_b(const Tensor2& a, const Tensor2& b) {
  if (a.rows() != b.rows())
    throw ShapeError("matmul_at_b: " + std::to_string(a.rows()) + " vs " + std::to_string(b.rows()));
  Tensor2 out(a.cols(), b.cols());
  const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
  for (std::size_t p = 0; p < k; ++p) {
    const double* ar = a.data().data() + p * m;
    const double* br = b.data().data() + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = ar[i];
      if (av == 0.0) continue;
      double* or_ = out.data().data() + i * n;
      for (std::size_t j = 0; j < n; ++j) or_[j] += av * br[j];
    }
  }
  return out;
}

Tensor2 matmul_a_bt(const Tensor2& a, const Tensor2& b) {
  if (a.cols() != b.cols())
    throw ShapeError("matmul_a_bt: " + std::to_string(a.cols()) + " vs " + std::to_string(b.cols()));
  Tensor2 out(a.rows(), b.rows());
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  for (std::size_t i = 0; i < m; ++i) {
    const double* ar = a.data().data() + i * k;
    double* or_ = out.data().data() + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* br = b.data().data() + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += ar[p] * br[p];
      or_[j] = acc;
    }
  }
  return out;
}

Tensor2 select_rows(const Tensor2& m, std::span<const std::size_t> idx) {
  Tensor2 out(idx.size(), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= m.rows()) throw DomainError("select_rows: index " + std::to_string(idx[i]) + " out of range");
    auto src = m.row(idx[i]);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) dst[j] = src[j];
  }
  return out;
}

}  // namespace wsfuse
