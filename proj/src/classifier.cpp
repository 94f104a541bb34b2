#include "wsfuse/classifier.hpp"

#include <cmath>

#include "wsfuse/label_model.hpp"  // kLogFloor

namespace wsfuse {

Mlp make_trunk(std::size_t in_dim, const std::vector<std::size_t>& hidden, Rng& rng) {
  if (hidden.empty()) throw ConfigError("make_trunk: need at least one hidden dimension");
  std::vector<std::size_t> front(hidden.begin(), hidden.end() - 1);
  return Mlp::make(in_dim, front, hidden.back(), Activation::relu, Activation::relu, rng);
}

Mlp make_classifier_head(std::size_t trunk_dim, std::size_t n_classes, Rng& rng) {
  return Mlp::make(trunk_dim, {}, n_classes, Activation::relu, Activation::softmax, rng);
}

Tensor2 classify_batch(const Mlp& trunk, const Mlp& head, const Tensor2& x) {
  return head.forward(trunk.forward(x));
}

std::vector<double> classify(const Mlp& trunk, const Mlp& head, std::span<const double> x) {
  Tensor2 in(1, x.size(), std::vector<double>(x.begin(), x.end()));
  Tensor2 out = classify_batch(trunk, head, in);
  return {out.row(0).begin(), out.row(0).end()};
}

std::vector<int> predict_classes(const Mlp& trunk, const Mlp& head, const Tensor2& x) {
  Tensor2 probs = classify_batch(trunk, head, x);
  std::vector<int> out(probs.rows());
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    auto r = probs.row(i);
    std::size_t best = 0;
    for (std::size_t j = 1; j < r.size(); ++j)
      if (r[j] > r[best]) best = j;
    out[i] = static_cast<int>(best);
  }
  return out;
}

namespace {
double log_clamped_target(double y) { return y > 0.0 ? std::log(y) : kRceLogZero; }
}  // namespace

double sce_loss(std::span<const double> probs, std::span<const double> target_onehot, double alpha,
                double beta) {
  if (probs.size() != target_onehot.size()) throw ShapeError("sce_loss: length mismatch");
  if (alpha < 0.0 || beta < 0.0) throw ConfigError("sce_loss: alpha and beta must be >= 0");
  double ce = 0.0, rce = 0.0;
  for (std::size_t t = 0; t < probs.size(); ++t) {
    ce -= target_onehot[t] * std::log(std::max(probs[t], kLogFloor));
    rce -= probs[t] * log_clamped_target(target_onehot[t]);
  }
  return alpha * ce + beta * rce;
}

double classifier_loss_grads(const Mlp& trunk, const Mlp& head, const Tensor2& x,
                             const Tensor2& target_onehot, double alpha, double beta,
                             std::span<double> grads) {
  const std::size_t batch = x.rows();
  if (target_onehot.rows() != batch) throw ShapeError("classifier_loss_grads: batch mismatch");
  const bool want_grads = !grads.empty();
  const std::size_t trunk_params = trunk.param_count();
  if (want_grads && grads.size() != trunk_params + head.param_count())
    throw ShapeError("classifier_loss_grads: gradient buffer size mismatch");

  MlpCache trunk_cache, head_cache;
  const Tensor2 feats = want_grads ? trunk.forward(x, trunk_cache) : trunk.forward(x);
  const Tensor2 probs = want_grads ? head.forward(feats, head_cache) : head.forward(feats);

  double loss = 0.0;
  for (std::size_t b = 0; b < batch; ++b)
    loss += sce_loss(probs.row(b), target_onehot.row(b), alpha, beta);
  loss /= double(batch);

  if (!want_grads) return loss;

  Tensor2 d_probs(batch, probs.cols());
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t t = 0; t < probs.cols(); ++t) {
      const double p = probs(b, t);
      const double y = target_onehot(b, t);
      double g = 0.0;
      if (p > kLogFloor) g -= alpha * y / p;
      g -= beta * log_clamped_target(y);
      d_probs(b, t) = g / double(batch);
    }

  Tensor2 d_feats = head.backward(head_cache, d_probs, grads.subspan(trunk_params));
  trunk.backward(trunk_cache, d_feats, grads.subspan(0, trunk_params));
  return loss;
}

double classifier_train_step(Mlp& trunk, Mlp& head, AdamState& opt, const Tensor2& x,
                             const Tensor2& target_onehot, double alpha, double beta) {
  std::vector<double> grads(trunk.param_count() + head.param_count(), 0.0);
  const double loss = classifier_loss_grads(trunk, head, x, target_onehot, alpha, beta, grads);
  if (!std::isfinite(loss)) throw NumericError("classifier_train_step: non-finite loss");
  adam_step_nets(opt, {&trunk, &head}, grads);
  return loss;
}

TrainingSubset refresh_subset(std::size_t epoch, std::size_t period,
                              const std::optional<TrainingSubset>& current,
                              const std::function<TrainingSubset()>& rebuild) {
  if (period == 0) throw ConfigError("refresh_subset: period must be >= 1");
  if (!current.has_value() || epoch % period == 0) return rebuild();
  return *current;
}

}  // namespace wsfuse
