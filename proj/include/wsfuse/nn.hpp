#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "wsfuse/rng.hpp"
#include "wsfuse/tensor.hpp"

namespace wsfuse {

enum class Activation : std::uint8_t { identity = 0, relu = 1, sigmoid = 2, softmax = 3 };

struct DenseLayer {
  Tensor2 weights;           // in_dim x out_dim
  std::vector<double> bias;  // out_dim
  Activation activation = Activation::identity;

  std::size_t in_dim() const { return weights.rows(); }
  std::size_t out_dim() const { return weights.cols(); }
};

// output = activation(input * W + b), applied row-wise; softmax normalizes
// each row to sum 1.
Tensor2 dense_forward(const DenseLayer& layer, const Tensor2& input);

// Activations recorded by a forward pass; required for backward.
struct MlpCache {
  Tensor2 input;
  std::vector<Tensor2> pre;   // z = x*W + b per layer
  std::vector<Tensor2> post;  // activation(z) per layer
  bool valid() const { return !pre.empty(); }
};

// Plain stack of dense layers. Parameters flatten in layer order, each layer
// as row-major weights followed by bias; gradients use the same layout.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<DenseLayer> layers);

  // He-scaled normal init (sqrt(2/fan_in) for relu layers, sqrt(1/fan_in)
  // otherwise), zero bias. Hidden layers use hidden_act, the last layer out_act.
  static Mlp make(std::size_t in_dim, const std::vector<std::size_t>& hidden,
                  std::size_t out_dim, Activation hidden_act, Activation out_act, Rng& rng);

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::size_t n_layers() const { return layers_.size(); }
  std::size_t in_dim() const { return layers_.front().in_dim(); }
  std::size_t out_dim() const { return layers_.back().out_dim(); }

  Tensor2 forward(const Tensor2& x) const;
  Tensor2 forward(const Tensor2& x, MlpCache& cache) const;

  // Backpropagates out_grad (dL/d output) through the recorded pass,
  // accumulating parameter gradients into grads (+=) and returning dL/d input.
  // Throws StateError if cache is empty, ShapeError on layout mismatch.
  Tensor2 backward(const MlpCache& cache, const Tensor2& out_grad, std::span<double> grads) const;

  std::size_t param_count() const;
  std::vector<double> params() const;
  void set_params(std::span<const double> p);

 private:
  std::vector<DenseLayer> layers_;
};

// Adam with bias correction over a flat parameter vector. Moments are sized
// on first step (or via init) and must match the parameter count thereafter.
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long long step = 0;
  std::vector<double> m, v;

  void init(std::size_t n) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
    step = 0;
  }
};

// Standard Adam update. Refuses the update (state and params untouched) with
// NumericError if any gradient entry is non-finite.
void adam_step(AdamState& st, std::span<double> params, std::span<const double> grads);

// One Adam update over the concatenated parameters of several networks, in
// the given order. grads layout matches the concatenation.
void adam_step_nets(AdamState& st, std::initializer_list<Mlp*> nets, std::span<const double> grads);

std::size_t total_param_count(std::initializer_list<const Mlp*> nets);

}  // namespace wsfuse
