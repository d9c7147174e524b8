#pragma once

#include "gcl/nn/network.hpp"

namespace gcl::nn {

struct RmspropOptions {
  double lr = 2e-5;
  double momentum = 0.60;
  double smoothing = 0.99;  // decay of the squared-gradient average
  double eps = 1e-8;
};

// Uncentered RMSprop with a momentum buffer over the preconditioned gradient:
//   square_avg   <- smoothing * square_avg + (1 - smoothing) * g^2
//   momentum_buf <- momentum * momentum_buf + g / sqrt(square_avg + eps)
//   param        <- param - lr * momentum_buf
struct RmspropState {
  RmspropOptions options;
  Gradients square_avg;
  Gradients momentum_buf;

  RmspropState() = default;
  RmspropState(const Network& net, RmspropOptions opts);
};

/// One in-place update of `net`. Throws ErrorKind::numeric if any gradient
/// entry is NaN/Inf (the network is left untouched in that case).
void rmsprop_step(RmspropState& state, Network& net, const Gradients& grads);

}  // namespace gcl::nn
