#include "wsfuse/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wsfuse {

namespace {

void apply_activation(Activation act, Tensor2& z) {
  switch (act) {
    case Activation::identity:
      return;
    case Activation::relu:
      for (double& v : z.data()) v = v > 0.0 ? v : 0.0;
      return;
    case Activation::sigmoid:
      for (double& v : z.data()) v = 1.0 / (1.0 + std::exp(-v));
      return;
    case Activation::softmax:
      for (std::size_t i = 0; i < z.rows(); ++i) {
        auto r = z.row(i);
        double mx = r[0];
        for (double v : r) mx = std::max(mx, v);
        double sum = 0.0;
        for (double& v : r) {
          v = std::exp(v - mx);
          sum += v;
        }
        for (double& v : r) v /= sum;
      }
      return;
  }
}

// dL/dz from dL/dy; z is the pre-activation, y the post-activation
Tensor2 activation_backward(Activation act, const Tensor2& z, const Tensor2& y, const Tensor2& g) {
  Tensor2 dz = g;
  switch (act) {
    case Activation::identity:
      break;
    case Activation::relu:
      for (std::size_t i = 0; i < dz.size(); ++i)
        if (z.data()[i] <= 0.0) dz.data()[i] = 0.0;
      break;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < dz.size(); ++i) {
        const double yi = y.data()[i];
        dz.data()[i] *= yi * (1.0 - yi);
      }
      break;
    case Activation::softmax:
      for (std::size_t i = 0; i < dz.rows(); ++i) {
        auto yr = y.row(i);
        auto gr = g.row(i);
        double dot = 0.0;
        for (std::size_t j = 0; j < yr.size(); ++j) dot += gr[j] * yr[j];
        auto dr = dz.row(i);
        for (std::size_t j = 0; j < yr.size(); ++j) dr[j] = yr[j] * (gr[j] - dot);
      }
      break;
  }
  return dz;
}

}  // namespace

Tensor2 dense_forward(const DenseLayer& layer, const Tensor2& input) {
  if (input.cols() != layer.in_dim())
    throw ShapeError("dense_forward: input cols " + std::to_string(input.cols()) +
                     " != layer in_dim " + std::to_string(layer.in_dim()));
  if (layer.bias.size() != layer.out_dim())
    throw ShapeError("dense_forward: bias length != out_dim");
  Tensor2 z = matmul(input, layer.weights);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    auto r = z.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += layer.bias[j];
  }
  apply_activation(layer.activation, z);
  return z;
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  for (std::size_t l = 1; l < layers_.size(); ++l)
    if (layers_[l].in_dim() != layers_[l - 1].out_dim())
      throw ShapeError("Mlp: layer " + std::to_string(l) + " input does not match previous output");
}

Mlp Mlp::make(std::size_t in_dim, const std::vector<std::size_t>& hidden, std::size_t out_dim,
              Activation hidden_act, Activation out_act, Rng& rng) {
  std::vector<DenseLayer> layers;
  std::size_t prev = in_dim;
  auto add = [&](std::size_t out, Activation act) {
    DenseLayer l;
    l.weights = Tensor2(prev, out);
    const double stddev =
        act == Activation::relu ? std::sqrt(2.0 / double(prev)) : std::sqrt(1.0 / double(prev));
    for (double& w : l.weights.data()) w = rng.normal() * stddev;
    l.bias.assign(out, 0.0);
    l.activation = act;
    layers.push_back(std::move(l));
    prev = out;
  };
  for (std::size_t h : hidden) add(h, hidden_act);
  add(out_dim, out_act);
  return Mlp(std::move(layers));
}

Tensor2 Mlp::forward(const Tensor2& x) const {
  Tensor2 cur = x;
  for (const auto& layer : layers_) cur = dense_forward(layer, cur);
  return cur;
}

Tensor2 Mlp::forward(const Tensor2& x, MlpCache& cache) const {
  cache.input = x;
  cache.pre.clear();
  cache.post.clear();
  Tensor2 cur = x;
  for (const auto& layer : layers_) {
    if (cur.cols() != layer.in_dim()) throw ShapeError("Mlp::forward: input dim mismatch");
    Tensor2 z = matmul(cur, layer.weights);
    for (std::size_t i = 0; i < z.rows(); ++i) {
      auto r = z.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) r[j] += layer.bias[j];
    }
    cache.pre.push_back(z);
    apply_activation(layer.activation, z);
    cache.post.push_back(z);
    cur = std::move(z);
  }
  return cur;
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

Tensor2 Mlp::backward(const MlpCache& cache, const Tensor2& out_grad, std::span<double> grads) const {
  if (!cache.valid()) throw StateError("Mlp::backward called without a recorded forward pass");
  if (cache.pre.size() != layers_.size()) throw StateError("Mlp::backward: cache does not match network");
  if (grads.size() != param_count()) throw ShapeError("Mlp::backward: gradient buffer size mismatch");
  if (out_grad.rows() != cache.post.back().rows() || out_grad.cols() != layers_.back().out_dim())
    throw ShapeError("Mlp::backward: out_grad shape mismatch");

  // per-layer parameter offsets in the flat layout
  std::vector<std::size_t> offsets(layers_.size());
  std::size_t off = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    offsets[l] = off;
    off += layers_[l].weights.size() + layers_[l].bias.size();
  }

  Tensor2 g = out_grad;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const DenseLayer& layer = layers_[li];
    const Tensor2& input = li == 0 ? cache.input : cache.post[li - 1];
    Tensor2 dz = activation_backward(layer.activation, cache.pre[li], cache.post[li], g);
    Tensor2 dw = matmul_at_b(input, dz);
    double* gw = grads.data() + offsets[li];
    for (std::size_t i = 0; i < dw.size(); ++i) gw[i] += dw.data()[i];
    double* gb = gw + layer.weights.size();
    for (std::size_t i = 0; i < dz.rows(); ++i) {
      auto r = dz.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) gb[j] += r[j];
    }
    g = matmul_a_bt(dz, layer.weights);
  }
  return g;
}

std::vector<double> Mlp::params() const {
  std::vector<double> out;
  out.reserve(param_count());
  for (const auto& l : layers_) {
    out.insert(out.end(), l.weights.data().begin(), l.weights.data().end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

void Mlp::set_params(std::span<const double> p) {
  if (p.size() != param_count()) throw ShapeError("Mlp::set_params: size mismatch");
  std::size_t off = 0;
  for (auto& l : layers_) {
    std::copy(p.begin() + off, p.begin() + off + l.weights.size(), l.weights.data().begin());
    off += l.weights.size();
    std::copy(p.begin() + off, p.begin() + off + l.bias.size(), l.bias.begin());
    off += l.bias.size();
  }
}

void adam_step(AdamState& st, std::span<double> params, std::span<const double> grads) {
  if (params.size() != grads.size()) throw ShapeError("adam_step: params/grads size mismatch");
  if (st.m.empty()) st.init(params.size());
  if (st.m.size() != params.size() || st.v.size() != params.size())
    throw ShapeError("adam_step: moment shape does not match parameters");
  for (double g : grads)
    if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient, update refused");

  st.step += 1;
  const double bc1 = 1.0 - std::pow(st.beta1, double(st.step));
  const double bc2 = 1.0 - std::pow(st.beta2, double(st.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * grads[i];
    st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * grads[i] * grads[i];
    const double mhat = st.m[i] / bc1;
    const double vhat = st.v[i] / bc2;
    params[i] -= st.lr * mhat / (std::sqrt(vhat) + st.eps);
  }
}

void adam_step_nets(AdamState& st, std::initializer_list<Mlp*> nets, std::span<const double> grads) {
  std::size_t total = 0;
  for (const Mlp* n : nets) total += n->param_count();
  if (grads.size() != total) throw ShapeError("adam_step_nets: gradient buffer size mismatch");

  std::vector<double> flat;
  flat.reserve(total);
  for (Mlp* n : nets) {
    auto p = n->params();
    flat.insert(flat.end(), p.begin(), p.end());
  }
  adam_step(st, flat, grads);  // throws before mutation on non-finite grads
  std::size_t off = 0;
  for (Mlp* n : nets) {
    n->set_params(std::span<const double>(flat.data() + off, n->param_count()));
    off += n->param_count();
  }
}

std::size_t total_param_count(std::initializer_list<const Mlp*> nets) {
  std::size_t total = 0;
  for (const Mlp* n : nets) total += n->param_count();
  return total;
}

}  // namespace wsfuse
