#pragma once

#include <span>
#include <vector>

#include "wsfuse/nn.hpp"
#include "wsfuse/rng.hpp"
#include "wsfuse/tensor.hpp"

namespace wsfuse {

// Conditional generator over feature space: input rows are [z | onehot(c)].
struct Generator {
  Mlp net;
  std::size_t d_z = 8;
  std::size_t n_classes = 2;
};

Generator make_generator(std::size_t d_z, std::size_t n_classes,
                         const std::vector<std::size_t>& hidden, std::size_t out_dim, Rng& rng);
Mlp make_discriminator_head(std::size_t trunk_dim, Rng& rng);

struct LatentBatch {
  Tensor2 input;                     // n x (d_z + C)
  std::vector<std::size_t> classes;  // conditioning class per row
};

// z ~ N(0, I), c ~ uniform over classes
LatentBatch sample_latent(const Generator& gen, std::size_t n, Rng& rng);
LatentBatch latent_for_class(const Generator& gen, std::size_t cls, std::size_t n, Rng& rng);

Tensor2 generate(const Generator& gen, const LatentBatch& latent);

// n class-conditioned samples; deterministic given the rng state.
// Throws DomainError for cls >= n_classes; n = 0 yields an empty tensor.
Tensor2 sample(const Generator& gen, std::size_t cls, std::size_t n, Rng& rng);

struct GanLossValues {
  double d_loss = 0.0;
  double g_adv = 0.0;
  double g_guidance = 0.0;
};

// Loss values only, on a fixed latent batch:
//   d_loss     = -E[log D(x_real)] - E[log(1 - D(G(z,c)))]
//   g_adv      = -E[log D(G(z,c))]            (non-saturating form)
//   g_guidance = E[CE(classifier(G(z,c)), c)]
GanLossValues gan_losses(const Tensor2& real, const Mlp& trunk, const Mlp& d_head,
                         const Generator& gen, const Mlp& cls_head, const LatentBatch& latent);

// Per-loss gradient routines (each fills only its designated buffer; other
// networks act as constants).
double d_loss_grads(const Tensor2& real, const Tensor2& fake, const Mlp& trunk, const Mlp& d_head,
                    std::span<double> grads_trunk_dhead);
double g_adv_loss_grads(const Generator& gen, const LatentBatch& latent, const Mlp& trunk,
                        const Mlp& d_head, std::span<double> grads_gen);
double g_guidance_loss_grads(const Generator& gen, const LatentBatch& latent, const Mlp& trunk,
                             const Mlp& cls_head, std::span<double> grads_gen);

// One batch update in order: G on the adversarial loss, G on the guidance
// loss, then D (trunk + head) on the discriminator loss. One latent batch is
// drawn and reused; fakes are regenerated after the G updates for the D step.
GanLossValues gan_train_step(Generator& gen, Mlp& trunk, Mlp& d_head, const Mlp& cls_head,
                             AdamState& opt_g_adv, AdamState& opt_g_guid, AdamState& opt_d,
                             const Tensor2& real, Rng& rng);

}  // namespace wsfuse
