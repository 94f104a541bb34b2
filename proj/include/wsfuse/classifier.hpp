#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wsfuse/nn.hpp"
#include "wsfuse/tensor.hpp"

namespace wsfuse {

// Reverse cross-entropy clamp: log 0 is taken as this constant. Standard
// symmetric-CE convention.
inline constexpr double kRceLogZero = -4.0;

// The trunk is a single parameter store shared by the classifier head, the
// discriminator head, and the accuracy-net input path; callers pass it
// explicitly so the sharing stays visible.
Mlp make_trunk(std::size_t in_dim, const std::vector<std::size_t>& hidden, Rng& rng);
Mlp make_classifier_head(std::size_t trunk_dim, std::size_t n_classes, Rng& rng);

Tensor2 classify_batch(const Mlp& trunk, const Mlp& head, const Tensor2& x);
std::vector<double> classify(const Mlp& trunk, const Mlp& head, std::span<const double> x);
std::vector<int> predict_classes(const Mlp& trunk, const Mlp& head, const Tensor2& x);

// alpha*CE + beta*RCE; CE uses the 1e-12 log floor on probs, RCE uses the
// log 0 := kRceLogZero clamp on the target entries.
double sce_loss(std::span<const double> probs, std::span<const double> target_onehot, double alpha,
                double beta);

// Mean SCE over the batch; grads (when non-empty) covers [trunk | head].
// Pseudo labels are constants.
double classifier_loss_grads(const Mlp& trunk, const Mlp& head, const Tensor2& x,
                             const Tensor2& target_onehot, double alpha, double beta,
                             std::span<double> grads);

double classifier_train_step(Mlp& trunk, Mlp& head, AdamState& opt, const Tensor2& x,
                             const Tensor2& target_onehot, double alpha, double beta);

// The frozen training subset: dataset indices plus one-hot pseudo labels,
// unchanged between refreshes.
struct TrainingSubset {
  std::vector<std::size_t> indices;
  Tensor2 onehot;  // |indices| x C
  std::size_t created_epoch = 0;
};

// Rebuilds via `rebuild` when epoch % period == 0 (or when nothing is frozen
// yet), otherwise returns the frozen subset unchanged.
TrainingSubset refresh_subset(std::size_t epoch, std::size_t period,
                              const std::optional<TrainingSubset>& current,
                              const std::function<TrainingSubset()>& rebuild);

}  // namespace wsfuse
