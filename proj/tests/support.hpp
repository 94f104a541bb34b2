#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "wsfuse/nn.hpp"
#include "wsfuse/rng.hpp"
#include "wsfuse/tensor.hpp"

namespace wsfuse::test {

// Central finite differences, the gradient oracle for every loss in the
// project. Stays independent of the analytic backward paths it checks.
inline std::vector<double> fd_grad(const std::function<double(std::span<const double>)>& f,
                                   std::vector<double> params, double step = 1e-6) {
  std::vector<double> grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double orig = params[i];
    params[i] = orig + step;
    const double hi = f(params);
    params[i] = orig - step;
    const double lo = f(params);
    params[i] = orig;
    grad[i] = (hi - lo) / (2.0 * step);
  }
  return grad;
}

inline double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double rel_grad_err(std::span<const double> analytic, std::span<const double> numeric) {
  double diff = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double d = analytic[i] - numeric[i];
    diff += d * d;
  }
  return std::sqrt(diff) / std::max(l2_norm(numeric), 1e-12);
}

inline Tensor2 random_tensor(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  Tensor2 t(rows, cols);
  for (double& v : t.data()) v = rng.normal() * scale;
  return t;
}

// row-stochastic random matrix (softmax of random logits)
inline Tensor2 random_probs(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor2 t(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0.0;
    auto r = t.row(i);
    for (double& v : r) {
      v = std::exp(rng.normal());
      sum += v;
    }
    for (double& v : r) v /= sum;
  }
  return t;
}

// symmetric matrix with entries in [0,1], unit diagonal
inline Tensor2 random_kernel_matrix(std::size_t n, Rng& rng) {
  Tensor2 sim(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    sim(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = rng.uniform();
      sim(i, j) = v;
      sim(j, i) = v;
    }
  }
  return sim;
}

}  // namespace wsfuse::test
