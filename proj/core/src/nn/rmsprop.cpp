#include "gcl/nn/rmsprop.hpp"

#include <cmath>
#include <string>

#include "gcl/error.hpp"

namespace gcl::nn {

RmspropState::RmspropState(const Network& net, RmspropOptions opts)
    : options(opts), square_avg(net.zeros_like()), momentum_buf(net.zeros_like()) {}

namespace {

void update_tensor(const RmspropOptions& o, Matrix& param, const Matrix& grad, Matrix& sq,
                   Matrix& mom) {
  auto p = param.values();
  auto g = grad.values();
  auto s = sq.values();
  auto m = mom.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    s[i] = o.smoothing * s[i] + (1.0 - o.smoothing) * g[i] * g[i];
    m[i] = o.momentum * m[i] + g[i] / std::sqrt(s[i] + o.eps);
    p[i] -= o.lr * m[i];
  }
}

}  // namespace

void rmsprop_step(RmspropState& state, Network& net, const Gradients& grads) {
  if (grads.size() != net.depth() || state.square_avg.size() != net.depth() ||
      state.momentum_buf.size() != net.depth()) {
    throw Error(ErrorKind::dimension, "rmsprop_step: gradient/state layer count mismatch");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    const auto& layer = net.layers()[i];
    if (!grads[i].weights.same_shape(layer.weights) || !grads[i].bias.same_shape(layer.bias) ||
        !state.square_avg[i].weights.same_shape(layer.weights) ||
        !state.momentum_buf[i].bias.same_shape(layer.bias)) {
      throw Error(ErrorKind::dimension,
                  "rmsprop_step: shape mismatch at layer " + std::to_string(i));
    }
    if (!grads[i].weights.all_finite() || !grads[i].bias.all_finite()) {
      throw Error(ErrorKind::numeric,
                  "rmsprop_step: non-finite gradient at layer " + std::to_string(i) +
                      " (training diverged)");
    }
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    auto& layer = net.layers()[i];
    update_tensor(state.options, layer.weights, grads[i].weights, state.square_avg[i].weights,
                  state.momentum_buf[i].weights);
    update_tensor(state.options, layer.bias, grads[i].bias, state.square_avg[i].bias,
                  state.momentum_buf[i].bias);
  }
}

}  // namespace gcl::nn
