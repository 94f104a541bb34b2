#include "wsfuse/gan.hpp"

#include <cmath>
#include <string>

#include "wsfuse/label_model.hpp"  // kLogFloor

namespace wsfuse {

Generator make_generator(std::size_t d_z, std::size_t n_classes,
                         const std::vector<std::size_t>& hidden, std::size_t out_dim, Rng& rng) {
  Generator g;
  g.d_z = d_z;
  g.n_classes = n_classes;
  g.net = Mlp::make(d_z + n_classes, hidden, out_dim, Activation::relu, Activation::identity, rng);
  return g;
}

Mlp make_discriminator_head(std::size_t trunk_dim, Rng& rng) {
  return Mlp::make(trunk_dim, {}, 1, Activation::relu, Activation::sigmoid, rng);
}

LatentBatch sample_latent(const Generator& gen, std::size_t n, Rng& rng) {
  LatentBatch out;
  out.input = Tensor2(n, gen.d_z + gen.n_classes);
  out.classes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.input.row(i);
    for (std::size_t d = 0; d < gen.d_z; ++d) row[d] = rng.normal();
    const std::size_t c = rng.uniform_index(gen.n_classes);
    out.classes[i] = c;
    row[gen.d_z + c] = 1.0;
  }
  return out;
}

LatentBatch latent_for_class(const Generator& gen, std::size_t cls, std::size_t n, Rng& rng) {
  if (cls >= gen.n_classes)
    throw DomainError("latent_for_class: class " + std::to_string(cls) + " out of range");
  LatentBatch out;
  out.input = Tensor2(n, gen.d_z + gen.n_classes);
  out.classes.assign(n, cls);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.input.row(i);
    for (std::size_t d = 0; d < gen.d_z; ++d) row[d] = rng.normal();
    row[gen.d_z + cls] = 1.0;
  }
  return out;
}

Tensor2 generate(const Generator& gen, const LatentBatch& latent) {
  return gen.net.forward(latent.input);
}

Tensor2 sample(const Generator& gen, std::size_t cls, std::size_t n, Rng& rng) {
  if (n == 0) return Tensor2(0, gen.net.out_dim());
  return generate(gen, latent_for_class(gen, cls, n, rng));
}

namespace {

double flog(double p) { return std::log(std::max(p, kLogFloor)); }

// mean -log D over a forward pass, with d(mean)/dD written to d_out
double neg_log_mean(const Tensor2& d_out_probs, Tensor2& d_grad, bool of_one_minus) {
  const std::size_t n = d_out_probs.rows();
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = d_out_probs(i, 0);
    const double p = of_one_minus ? 1.0 - d : d;
    loss -= flog(p);
    double g = 0.0;
    if (p > kLogFloor) g = (of_one_minus ? 1.0 : -1.0) / (p * double(n));
    d_grad(i, 0) = g;
  }
  return loss / double(n);
}

}  // namespace

double d_loss_grads(const Tensor2& real, const Tensor2& fake, const Mlp& trunk, const Mlp& d_head,
                    std::span<double> grads_trunk_dhead) {
  const bool want_grads = !grads_trunk_dhead.empty();
  const std::size_t trunk_params = trunk.param_count();
  if (want_grads && grads_trunk_dhead.size() != trunk_params + d_head.param_count())
    throw ShapeError("d_loss_grads: gradient buffer size mismatch");

  double loss = 0.0;
  auto run_side = [&](const Tensor2& x, bool is_fake) {
    MlpCache tc, hc;
    const Tensor2 feats = want_grads ? trunk.forward(x, tc) : trunk.forward(x);
    const Tensor2 d = want_grads ? d_head.forward(feats, hc) : d_head.forward(feats);
    Tensor2 d_grad(d.rows(), 1);
    loss += neg_log_mean(d, d_grad, is_fake);
    if (want_grads) {
      Tensor2 d_feats = d_head.backward(hc, d_grad, grads_trunk_dhead.subspan(trunk_params));
      trunk.backward(tc, d_feats, grads_trunk_dhead.subspan(0, trunk_params));
    }
  };
  run_side(real, false);
  run_side(fake, true);
  return loss;
}

double g_adv_loss_grads(const Generator& gen, const LatentBatch& latent, const Mlp& trunk,
                        const Mlp& d_head, std::span<double> grads_gen) {
  const bool want_grads = !grads_gen.empty();
  if (want_grads && grads_gen.size() != gen.net.param_count())
    throw ShapeError("g_adv_loss_grads: gradient buffer size mismatch");

  MlpCache gc, tc, hc;
  const Tensor2 xg = want_grads ? gen.net.forward(latent.input, gc) : gen.net.forward(latent.input);
  const Tensor2 feats = want_grads ? trunk.forward(xg, tc) : trunk.forward(xg);
  const Tensor2 d = want_grads ? d_head.forward(feats, hc) : d_head.forward(feats);
  Tensor2 d_grad(d.rows(), 1);
  const double loss = neg_log_mean(d, d_grad, false);
  if (want_grads) {
    // discriminator acts as a fixed function; its parameter grads are discarded
    std::vector<double> scratch_head(d_head.param_count(), 0.0);
    std::vector<double> scratch_trunk(trunk.param_count(), 0.0);
    Tensor2 d_feats = d_head.backward(hc, d_grad, scratch_head);
    Tensor2 d_xg = trunk.backward(tc, d_feats, scratch_trunk);
    gen.net.backward(gc, d_xg, grads_gen);
  }
  return loss;
}

double g_guidance_loss_grads(const Generator& gen, const LatentBatch& latent, const Mlp& trunk,
                             const Mlp& cls_head, std::span<double> grads_gen) {
  const bool want_grads = !grads_gen.empty();
  if (want_grads && grads_gen.size() != gen.net.param_count())
    throw ShapeError("g_guidance_loss_grads: gradient buffer size mismatch");
  const std::size_t n = latent.input.rows();

  MlpCache gc, tc, hc;
  const Tensor2 xg = want_grads ? gen.net.forward(latent.input, gc) : gen.net.forward(latent.input);
  const Tensor2 feats = want_grads ? trunk.forward(xg, tc) : trunk.forward(xg);
  const Tensor2 probs = want_grads ? cls_head.forward(feats, hc) : cls_head.forward(feats);

  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) loss -= flog(probs(i, latent.classes[i]));
  loss /= double(n);

  if (want_grads) {
    Tensor2 d_probs(n, probs.cols());
    for (std::size_t i = 0; i < n; ++i) {
      const double p = probs(i, latent.classes[i]);
      if (p > kLogFloor) d_probs(i, latent.classes[i]) = -1.0 / (p * double(n));
    }
    std::vector<double> scratch_head(cls_head.param_count(), 0.0);
    std::vector<double> scratch_trunk(trunk.param_count(), 0.0);
    Tensor2 d_feats = cls_head.backward(hc, d_probs, scratch_head);
    Tensor2 d_xg = trunk.backward(tc, d_feats, scratch_trunk);
    gen.net.backward(gc, d_xg, grads_gen);
  }
  return loss;
}

GanLossValues gan_losses(const Tensor2& real, const Mlp& trunk, const Mlp& d_head,
                         const Generator& gen, const Mlp& cls_head, const LatentBatch& latent) {
  GanLossValues v;
  const Tensor2 fake = generate(gen, latent);
  v.d_loss = d_loss_grads(real, fake, trunk, d_head, {});
  v.g_adv = g_adv_loss_grads(gen, latent, trunk, d_head, {});
  v.g_guidance = g_guidance_loss_grads(gen, latent, trunk, cls_head, {});
  return v;
}

GanLossValues gan_train_step(Generator& gen, Mlp& trunk, Mlp& d_head, const Mlp& cls_head,
                             AdamState& opt_g_adv, AdamState& opt_g_guid, AdamState& opt_d,
                             const Tensor2& real, Rng& rng) {
  if (real.rows() == 0) throw DomainError("gan_train_step: empty batch");
  GanLossValues v;
  const LatentBatch latent = sample_latent(gen, real.rows(), rng);

  std::vector<double> grads_gen(gen.net.param_count(), 0.0);
  v.g_adv = g_adv_loss_grads(gen, latent, trunk, d_head, grads_gen);
  if (!std::isfinite(v.g_adv)) throw NumericError("gan_train_step: non-finite adversarial loss");
  adam_step_nets(opt_g_adv, {&gen.net}, grads_gen);

  std::fill(grads_gen.begin(), grads_gen.end(), 0.0);
  v.g_guidance = g_guidance_loss_grads(gen, latent, trunk, cls_head, grads_gen);
  if (!std::isfinite(v.g_guidance)) throw NumericError("gan_train_step: non-finite guidance loss");
  adam_step_nets(opt_g_guid, {&gen.net}, grads_gen);

  const Tensor2 fake = generate(gen, latent);  // constants for the D step
  std::vector<double> grads_d(trunk.param_count() + d_head.param_count(), 0.0);
  v.d_loss = d_loss_grads(real, fake, trunk, d_head, grads_d);
  if (!std::isfinite(v.d_loss)) throw NumericError("gan_train_step: non-finite discriminator loss");
  adam_step_nets(opt_d, {&trunk, &d_head}, grads_d);

  return v;
}

}  // namespace wsfuse
