#include "wsfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wsfuse {

ClassificationReport classification_report(std::span<const int> pred, std::span<const int> gold,
                                           std::size_t n_classes) {
  if (pred.size() != gold.size())
    throw DomainError("classification_report: pred length " + std::to_string(pred.size()) +
                      " != gold length " + std::to_string(gold.size()));
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] < 0 || gold[i] < 0 || std::size_t(pred[i]) >= n_classes ||
        std::size_t(gold[i]) >= n_classes)
      throw DomainError("classification_report: label outside [0, C) at position " + std::to_string(i));

  std::vector<std::size_t> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0);
  ClassificationReport rep;
  rep.support.assign(n_classes, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto p = std::size_t(pred[i]), g = std::size_t(gold[i]);
    rep.support[g] += 1;
    if (p == g) {
      tp[p] += 1;
      ++correct;
    } else {
      fp[p] += 1;
      fn[g] += 1;
    }
  }
  rep.accuracy = pred.empty() ? 0.0 : double(correct) / double(pred.size());
  rep.precision.resize(n_classes);
  rep.recall.resize(n_classes);
  rep.f1.resize(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    const double pden = double(tp[c] + fp[c]);
    const double rden = double(tp[c] + fn[c]);
    rep.precision[c] = pden > 0 ? double(tp[c]) / pden : 0.0;
    rep.recall[c] = rden > 0 ? double(tp[c]) / rden : 0.0;
    const double s = rep.precision[c] + rep.recall[c];
    rep.f1[c] = s > 0 ? 2.0 * rep.precision[c] * rep.recall[c] / s : 0.0;
    rep.macro_precision += rep.precision[c];
    rep.macro_recall += rep.recall[c];
    rep.macro_f1 += rep.f1[c];
  }
  rep.macro_precision /= double(n_classes);
  rep.macro_recall /= double(n_classes);
  rep.macro_f1 /= double(n_classes);
  return rep;
}

namespace {
double comb2(double x) { return x * (x - 1.0) / 2.0; }
}  // namespace

double ari(std::span<const int> labels_a, std::span<const int> labels_b) {
  if (labels_a.size() != labels_b.size()) throw DomainError("ari: length mismatch");
  if (labels_a.size() < 2) throw DomainError("ari: need at least 2 samples");
  const std::size_t n = labels_a.size();

  auto remap = [](std::span<const int> labels, std::vector<std::size_t>& out) {
    std::vector<int> uniq(labels.begin(), labels.end());
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    out.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
      out[i] = std::size_t(std::lower_bound(uniq.begin(), uniq.end(), labels[i]) - uniq.begin());
    return uniq.size();
  };
  std::vector<std::size_t> a, b;
  const std::size_t ka = remap(labels_a, a);
  const std::size_t kb = remap(labels_b, b);

  // both trivial partitions (single cluster, or all singletons) agree exactly
  if ((ka == 1 && kb == 1) || (ka == n && kb == n)) return 1.0;

  std::vector<std::size_t> contingency(ka * kb, 0), row(ka, 0), col(kb, 0);
  for (std::size_t i = 0; i < n; ++i) {
    contingency[a[i] * kb + b[i]] += 1;
    row[a[i]] += 1;
    col[b[i]] += 1;
  }
  double sum_cells = 0.0;
  for (std::size_t c : contingency) sum_cells += comb2(double(c));
  double sum_rows = 0.0, sum_cols = 0.0;
  for (std::size_t c : row) sum_rows += comb2(double(c));
  for (std::size_t c : col) sum_cols += comb2(double(c));
  const double expected = sum_rows * sum_cols / comb2(double(n));
  const double maximum = 0.5 * (sum_rows + sum_cols);
  if (maximum == expected) return 1.0;
  return (sum_cells - expected) / (maximum - expected);
}

namespace {

// Cyclic Jacobi eigendecomposition for small symmetric matrices. a is
// overwritten with a diagonal-ish matrix; eigenvalues land on the diagonal
// and eigenvectors in the columns of v.
void jacobi_eigen(Tensor2& a, Tensor2& v) {
  const std::size_t n = a.rows();
  v = Tensor2(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
  }
}

// symmetric PSD square root, negative eigenvalues clamped at 0
Tensor2 psd_sqrt(const Tensor2& m) {
  Tensor2 a = m, v;
  jacobi_eigen(a, v);
  const std::size_t n = m.rows();
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = std::sqrt(std::max(a(i, i), 0.0));
  Tensor2 out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += v(i, k) * sq[k] * v(j, k);
      out(i, j) = acc;
    }
  return out;
}

void mean_and_cov(const Tensor2& x, std::vector<double>& mean, Tensor2& cov) {
  const std::size_t n = x.rows(), d = x.cols();
  mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += x(i, j);
  for (double& m : mean) m /= double(n);
  cov = Tensor2(d, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < d; ++a) {
      const double da = x(i, a) - mean[a];
      for (std::size_t b = 0; b < d; ++b) cov(a, b) += da * (x(i, b) - mean[b]);
    }
  for (double& c : cov.data()) c /= double(n - 1);
}

}  // namespace

double frechet2d(const Tensor2& samples_a, const Tensor2& samples_b) {
  if (samples_a.rows() < 2 || samples_b.rows() < 2)
    throw DomainError("frechet2d: need at least 2 samples per set");
  if (samples_a.cols() != samples_b.cols()) throw DomainError("frechet2d: dimension mismatch");
  if (samples_a.cols() > 16) throw DomainError("frechet2d: dimension > 16");

  std::vector<double> mu_a, mu_b;
  Tensor2 cov_a, cov_b;
  mean_and_cov(samples_a, mu_a, cov_a);
  mean_and_cov(samples_b, mu_b, cov_b);

  double mean_term = 0.0;
  for (std::size_t j = 0; j < mu_a.size(); ++j) {
    const double dm = mu_a[j] - mu_b[j];
    mean_term += dm * dm;
  }

  double trace_a = 0.0, trace_b = 0.0;
  for (std::size_t j = 0; j < cov_a.rows(); ++j) {
    trace_a += cov_a(j, j);
    trace_b += cov_b(j, j);
  }

  // Tr((Sa Sb)^{1/2}) computed through the similar symmetric form
  // (Sb^{1/2} Sa Sb^{1/2})^{1/2}
  Tensor2 root_b = psd_sqrt(cov_b);
  Tensor2 inner = matmul(matmul(root_b, cov_a), root_b);
  for (std::size_t i = 0; i < inner.rows(); ++i)
    for (std::size_t j = i + 1; j < inner.cols(); ++j) {
      const double s = 0.5 * (inner(i, j) + inner(j, i));
      inner(i, j) = s;
      inner(j, i) = s;
    }
  Tensor2 v;
  jacobi_eigen(inner, v);
  double trace_sqrt = 0.0;
  for (std::size_t i = 0; i < inner.rows(); ++i)
    trace_sqrt += std::sqrt(std::max(inner(i, i), 0.0));

  return std::max(mean_term + trace_a + trace_b - 2.0 * trace_sqrt, 0.0);
}

}  // namespace wsfuse
