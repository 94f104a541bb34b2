#include "wsfuse/label_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wsfuse {

VoteMatrix::VoteMatrix(std::size_t n, std::size_t k, std::vector<int> votes, std::size_t n_classes)
    : n_(n), k_(k), n_classes_(n_classes), votes_(std::move(votes)) {
  if (votes_.size() != n_ * k_) throw ShapeError("VoteMatrix: votes length != n*k");
  for (std::size_t i = 0; i < n_; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < k_; ++j) {
      const int v = votes_[i * k_ + j];
      if (v == kAbstain) continue;
      if (v < 0 || static_cast<std::size_t>(v) >= n_classes_)
        throw DomainError("VoteMatrix: vote " + std::to_string(v) + " at row " + std::to_string(i) +
                          " outside [0, " + std::to_string(n_classes_) + ")");
      any = true;
    }
    if (any) non_abstained_.push_back(i);
  }
}

Tensor2 potentials(std::span<const int> votes_row, std::size_t n_classes) {
  Tensor2 out(votes_row.size(), n_classes);
  for (std::size_t k = 0; k < votes_row.size(); ++k) {
    const int v = votes_row[k];
    if (v == kAbstain) continue;
    if (v < 0 || static_cast<std::size_t>(v) >= n_classes)
      throw DomainError("potentials: vote " + std::to_string(v) + " outside [0, " +
                        std::to_string(n_classes) + ")");
    out(k, static_cast<std::size_t>(v)) = 1.0;
  }
  return out;
}

std::vector<double> label_posterior(std::span<const int> votes_row,
                                    std::span<const double> accuracies, std::size_t n_classes) {
  if (accuracies.size() != votes_row.size())
    throw ShapeError("label_posterior: accuracies length != number of votes");
  std::vector<double> scores(n_classes, 0.0);
  for (std::size_t k = 0; k < votes_row.size(); ++k) {
    const int v = votes_row[k];
    if (v == kAbstain) continue;
    if (v < 0 || static_cast<std::size_t>(v) >= n_classes)
      throw DomainError("label_posterior: vote outside class range");
    scores[static_cast<std::size_t>(v)] += accuracies[k];
  }
  double mx = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - mx);
    sum += s;
  }
  for (double& s : scores) s /= sum;
  return scores;
}

std::size_t pseudo_label(std::span<const double> dist) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < dist.size(); ++j)
    if (dist[j] > dist[best]) best = j;
  return best;
}

double entropy(std::span<const double> dist) {
  double h = 0.0;
  for (double p : dist)
    if (p > 0.0) h -= p * std::log(p);
  return std::max(h, 0.0);
}

std::size_t majority_vote(std::span<const int> votes_row, std::size_t n_classes) {
  std::vector<std::size_t> counts(n_classes, 0);
  for (int v : votes_row)
    if (v != kAbstain) counts[static_cast<std::size_t>(v)] += 1;
  std::size_t best = 0;
  for (std::size_t j = 1; j < n_classes; ++j)
    if (counts[j] > counts[best]) best = j;
  return best;
}

double decay_mu(std::size_t epoch, std::size_t n_classes, double delta) {
  if (delta <= 0.0) throw ConfigError("decay_mu: delta must be > 0");
  return static_cast<double>(n_classes) / (static_cast<double>(epoch) * delta + 1.0);
}

double decay_loss(std::span<const double> accuracies, std::size_t epoch, std::size_t n_classes,
                  double delta) {
  const double mu = decay_mu(epoch, n_classes, delta);
  double sq = 0.0;
  for (double a : accuracies) sq += (a - 0.5) * (a - 0.5);
  return mu * sq;
}

LabelModel make_label_model(std::size_t feat_dim, std::size_t n_lfs, std::size_t n_classes,
                            const std::vector<std::size_t>& hidden, Rng& rng) {
  LabelModel lm;
  lm.accuracy_net =
      Mlp::make(feat_dim, hidden, n_lfs, Activation::relu, Activation::sigmoid, rng);
  lm.alignment_head = Mlp::make(n_classes, {}, n_classes, Activation::relu, Activation::softmax, rng);
  // scaled-diagonal start: argmax-preserving calibration map, so alignment
  // gradients point through a sensible chart from the first step
  {
    auto params = lm.alignment_head.params();
    std::fill(params.begin(), params.end(), 0.0);
    for (std::size_t j = 0; j < n_classes; ++j) params[j * n_classes + j] = 6.0;
    lm.alignment_head.set_params(params);
  }
  return lm;
}

double alignment_loss(std::span<const double> classifier_probs, std::span<const double> lm_dist,
                      const Mlp& alignment_head) {
  if (classifier_probs.size() != lm_dist.size())
    throw ShapeError("alignment_loss: distribution lengths differ");
  Tensor2 in(1, lm_dist.size(), std::vector<double>(lm_dist.begin(), lm_dist.end()));
  Tensor2 out = alignment_head.forward(in);
  double loss = 0.0;
  for (std::size_t t = 0; t < classifier_probs.size(); ++t)
    loss -= classifier_probs[t] * std::log(std::max(out(0, t), kLogFloor));
  return loss;
}

Tensor2 posterior_batch(const LabelModel& lm, const Tensor2& trunk_feats, const VoteMatrix& votes,
                        std::span<const std::size_t> rows) {
  const Tensor2 acc = lm.accuracy_net.forward(trunk_feats);
  Tensor2 out(rows.size(), votes.n_classes());
  for (std::size_t b = 0; b < rows.size(); ++b) {
    auto p = label_posterior(votes.row(rows[b]), acc.row(b), votes.n_classes());
    auto dst = out.row(b);
    std::copy(p.begin(), p.end(), dst.begin());
  }
  return out;
}

LmLossParts lm_loss_grads(const LabelModel& lm, const Tensor2& trunk_feats, const VoteMatrix& votes,
                          std::span<const std::size_t> rows, const Tensor2& classifier_probs,
                          std::size_t epoch, double delta, double align_weight,
                          std::span<double> grads) {
  const std::size_t batch = rows.size();
  const std::size_t n_classes = votes.n_classes();
  if (trunk_feats.rows() != batch || classifier_probs.rows() != batch)
    throw ShapeError("lm_loss_grads: batch row mismatch");
  if (classifier_probs.cols() != n_classes)
    throw ShapeError("lm_loss_grads: classifier probs width != n_classes");

  const bool want_grads = !grads.empty();
  const std::size_t acc_params = lm.accuracy_net.param_count();
  if (want_grads && grads.size() != acc_params + lm.alignment_head.param_count())
    throw ShapeError("lm_loss_grads: gradient buffer size mismatch");

  MlpCache acc_cache;
  const Tensor2 acc = want_grads ? lm.accuracy_net.forward(trunk_feats, acc_cache)
                                 : lm.accuracy_net.forward(trunk_feats);

  Tensor2 posteriors(batch, n_classes);
  for (std::size_t b = 0; b < batch; ++b) {
    auto p = label_posterior(votes.row(rows[b]), acc.row(b), n_classes);
    std::copy(p.begin(), p.end(), posteriors.row(b).begin());
  }

  MlpCache head_cache;
  const Tensor2 aligned = want_grads ? lm.alignment_head.forward(posteriors, head_cache)
                                     : lm.alignment_head.forward(posteriors);

  const double mu = decay_mu(epoch, n_classes, delta);
  LmLossParts parts;
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < n_classes; ++t)
      parts.align -= classifier_probs(b, t) * std::log(std::max(aligned(b, t), kLogFloor));
    double sq = 0.0;
    for (double a : acc.row(b)) sq += (a - 0.5) * (a - 0.5);
    parts.decay += mu * sq;
  }
  parts.align /= double(batch);
  parts.decay /= double(batch);
  parts.total = align_weight * parts.align + parts.decay;

  if (!want_grads) return parts;

  // d(align)/d(aligned output), already scaled by weight and batch mean
  Tensor2 d_aligned(batch, n_classes);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t t = 0; t < n_classes; ++t) {
      const double q = aligned(b, t);
      d_aligned(b, t) =
          q > kLogFloor ? -align_weight * classifier_probs(b, t) / (q * double(batch)) : 0.0;
    }

  Tensor2 d_post = lm.alignment_head.backward(head_cache, d_aligned,
                                              grads.subspan(acc_params));

  // back through the posterior softmax into the accuracy outputs, plus the
  // decay term
  Tensor2 d_acc(batch, acc.cols());
  for (std::size_t b = 0; b < batch; ++b) {
    auto p = posteriors.row(b);
    auto dp = d_post.row(b);
    double dot = 0.0;
    for (std::size_t j = 0; j < n_classes; ++j) dot += dp[j] * p[j];
    auto votes_row = votes.row(rows[b]);
    for (std::size_t k = 0; k < votes_row.size(); ++k) {
      const int v = votes_row[k];
      double g = 0.0;
      if (v != kAbstain) {
        const std::size_t j = static_cast<std::size_t>(v);
        g = p[j] * (dp[j] - dot);  // d(score_j)/dA_k = 1 for the voted class
      }
      g += 2.0 * mu * (acc(b, k) - 0.5) / double(batch);
      d_acc(b, k) = g;
    }
  }
  lm.accuracy_net.backward(acc_cache, d_acc, grads.subspan(0, acc_params));
  return parts;
}

LmLossParts lm_train_step(LabelModel& lm, AdamState& opt, const Tensor2& trunk_feats,
                          const VoteMatrix& votes, std::span<const std::size_t> rows,
                          const Tensor2& classifier_probs, std::size_t epoch, double delta,
                          double align_weight) {
  std::vector<double> grads(lm.accuracy_net.param_count() + lm.alignment_head.param_count(), 0.0);
  LmLossParts parts = lm_loss_grads(lm, trunk_feats, votes, rows, classifier_probs, epoch, delta,
                                    align_weight, grads);
  if (!std::isfinite(parts.total)) throw NumericError("lm_train_step: non-finite loss");
  adam_step_nets(opt, {&lm.accuracy_net, &lm.alignment_head}, grads);
  return parts;
}

}  // namespace wsfuse
