#pragma once

#include <span>
#include <vector>

#include "wsfuse/nn.hpp"
#include "wsfuse/tensor.hpp"

namespace wsfuse {

inline constexpr int kAbstain = -1;

// Floor applied to every log of a probability; keeps losses finite when a
// softmax output underflows.
inline constexpr double kLogFloor = 1e-12;

// Per-sample label-function votes; entries are class indices or kAbstain.
class VoteMatrix {
 public:
  VoteMatrix() = default;
  // votes is row-major n x k; every non-abstain entry must be < n_classes.
  VoteMatrix(std::size_t n, std::size_t k, std::vector<int> votes, std::size_t n_classes);

  std::size_t n() const { return n_; }
  std::size_t n_lfs() const { return k_; }
  std::size_t n_classes() const { return n_classes_; }

  int vote(std::size_t i, std::size_t k) const { return votes_[i * k_ + k]; }
  std::span<const int> row(std::size_t i) const { return {votes_.data() + i * k_, k_}; }

  // indices of samples with at least one non-abstain vote (the set the label
  // model operates on)
  const std::vector<std::size_t>& non_abstained() const { return non_abstained_; }

 private:
  std::size_t n_ = 0, k_ = 0, n_classes_ = 0;
  std::vector<int> votes_;
  std::vector<std::size_t> non_abstained_;
};

// Indicator potentials: entry (k, y) = 1 iff votes_row[k] == y; abstain rows
// are all-zero.
Tensor2 potentials(std::span<const int> votes_row, std::size_t n_classes);

// probs[j] = exp(sum_k A_k * 1[vote_k == j]) / normalizer. All-abstain rows
// yield the uniform distribution.
std::vector<double> label_posterior(std::span<const int> votes_row,
                                    std::span<const double> accuracies, std::size_t n_classes);

// argmax with ties broken toward the lowest class index
std::size_t pseudo_label(std::span<const double> dist);

// Shannon entropy in nats, 0*log 0 := 0
double entropy(std::span<const double> dist);

// majority vote over non-abstained votes, lowest class index on ties;
// all-abstain rows map to class 0
std::size_t majority_vote(std::span<const int> votes_row, std::size_t n_classes);

// mu(e) = C / (e * delta + 1), epoch indexed from 0
double decay_mu(std::size_t epoch, std::size_t n_classes, double delta);

// mu(e) * ||accuracies - 0.5||^2
double decay_loss(std::span<const double> accuracies, std::size_t epoch, std::size_t n_classes,
                  double delta);

// Accuracy network (features -> per-LF accuracies in (0,1)) plus the linear
// softmax head that aligns label-model posteriors with classifier outputs.
struct LabelModel {
  Mlp accuracy_net;    // feat_dim -> K, relu hidden, sigmoid out
  Mlp alignment_head;  // C -> C, single softmax layer
};

LabelModel make_label_model(std::size_t feat_dim, std::size_t n_lfs, std::size_t n_classes,
                            const std::vector<std::size_t>& hidden, Rng& rng);

// Cross-entropy of the aligned posterior against classifier probabilities
// (constants): -sum_t P(t|x) log(head(lm_dist))_t with the log floor.
double alignment_loss(std::span<const double> classifier_probs, std::span<const double> lm_dist,
                      const Mlp& alignment_head);

// posteriors for a batch of rows; trunk_feats rows align with `rows`
Tensor2 posterior_batch(const LabelModel& lm, const Tensor2& trunk_feats, const VoteMatrix& votes,
                        std::span<const std::size_t> rows);

struct LmLossParts {
  double total = 0.0;
  double align = 0.0;
  double decay = 0.0;
};

// Mean (align_weight * l_align + l_decay) over the batch. When grads is
// non-empty it must cover [accuracy_net | alignment_head] and receives the
// accumulated gradients; classifier_probs and trunk_feats are constants.
LmLossParts lm_loss_grads(const LabelModel& lm, const Tensor2& trunk_feats, const VoteMatrix& votes,
                          std::span<const std::size_t> rows, const Tensor2& classifier_probs,
                          std::size_t epoch, double delta, double align_weight,
                          std::span<double> grads);

// One Adam step on the batch loss. Aborts with NumericError (state untouched)
// if the loss is non-finite.
LmLossParts lm_train_step(LabelModel& lm, AdamState& opt, const Tensor2& trunk_feats,
                          const VoteMatrix& votes, std::span<const std::size_t> rows,
                          const Tensor2& classifier_probs, std::size_t epoch, double delta,
                          double align_weight = 1.0);

}  // namespace wsfuse
