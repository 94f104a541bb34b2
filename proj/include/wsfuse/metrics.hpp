#pragma once

#include <span>
#include <vector>

#include "wsfuse/tensor.hpp"

namespace wsfuse {

struct ClassificationReport {
  double accuracy = 0.0;
  std::vector<double> precision, recall, f1;  // per class
  std::vector<std::size_t> support;
  double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
};

// Standard definitions; a class with zero predicted positives gets precision
// 0 (same for recall/F1 with zero denominators). Macro scores are unweighted
// means over classes.
ClassificationReport classification_report(std::span<const int> pred, std::span<const int> gold,
                                           std::size_t n_classes);

// Adjusted Rand index via the contingency-table formula; 1 for identical
// partitions (up to relabeling), ~0 for independent ones.
double ari(std::span<const int> labels_a, std::span<const int> labels_b);

// Frechet distance between Gaussian fits of two low-dimensional sample sets
// (rows = samples): ||mu_a - mu_b||^2 + Tr(Sa + Sb - 2(Sa Sb)^{1/2}).
// Covariances use the n-1 normalization; matrix square roots go through a
// symmetric eigendecomposition with negative eigenvalues clamped at 0.
double frechet2d(const Tensor2& samples_a, const Tensor2& samples_b);

}  // namespace wsfuse
