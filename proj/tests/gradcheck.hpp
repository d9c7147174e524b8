#pragma once

// Random (network, input, loss) triples for gradient checking, shared by the
// unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gcl/nn/loss.hpp"
#include "gcl/nn/network.hpp"
#include "oracles.hpp"

namespace gradcheck {

enum class LossKind {
  reconstruction,  // ||f - G(f)||, target = input
  bce,             // binary cross-entropy on a sigmoid column
  nl_target,       // ||t - G(f)|| with some rows' targets replaced by ones
};

inline const char* name(LossKind k) {
  switch (k) {
    case LossKind::reconstruction: return "reconstruction";
    case LossKind::bce: return "bce";
    case LossKind::nl_target: return "nl_target";
  }
  return "?";
}

struct Case {
  LossKind kind = LossKind::reconstruction;
  gcl::nn::Network net;
  gcl::nn::Matrix input;
  gcl::nn::Matrix target;           // reconstruction / nl_target
  std::vector<double> bce_targets;  // bce
  std::vector<std::uint8_t> include;
};

struct Result {
  double max_rel_error = 0.0;
  std::size_t entries = 0;
};

// Smallest |pre-activation| over every relu unit; finite differences are only
// meaningful away from the kink.
inline double min_relu_margin(const gcl::nn::Network& net, const gcl::nn::Matrix& x) {
  double margin = INFINITY;
  auto cur = oracle::to_rows(x);
  for (const auto& layer : net.layers()) {
    std::vector<std::vector<double>> next(cur.size(), std::vector<double>(layer.out_dim()));
    for (std::size_t r = 0; r < cur.size(); ++r) {
      for (std::size_t j = 0; j < layer.out_dim(); ++j) {
        double z = layer.bias(0, j);
        for (std::size_t i = 0; i < layer.in_dim(); ++i) z += cur[r][i] * layer.weights(i, j);
        if (layer.activation == gcl::nn::Activation::relu) margin = std::min(margin, std::abs(z));
        next[r][j] = oracle::activate(layer.activation, z);
      }
    }
    cur = std::move(next);
  }
  return margin;
}

inline Case make_case(std::uint64_t seed, LossKind kind) {
  using gcl::nn::Activation;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> width(2, 16), depth(1, 3), batch(1, 8);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const Activation hidden_pool[] = {Activation::relu, Activation::sigmoid, Activation::identity};
  std::uniform_int_distribution<int> pick(0, 2);

  for (;;) {
    Case c;
    c.kind = kind;
    const std::size_t d = width(rng);
    const std::size_t layers = depth(rng);
    std::vector<std::size_t> dims{d};
    std::vector<Activation> acts;
    for (std::size_t l = 0; l + 1 < layers; ++l) {
      dims.push_back(width(rng));
      acts.push_back(hidden_pool[pick(rng)]);
    }
    if (kind == LossKind::bce) {
      dims.push_back(1);
      acts.push_back(Activation::sigmoid);
    } else {
      dims.push_back(d);
      acts.push_back(hidden_pool[pick(rng)]);
    }
    c.net = gcl::nn::init_network(dims, acts, rng());
    // non-zero biases so every code path sees them
    for (auto& layer : c.net.layers())
      for (double& b : layer.bias.values()) b = 0.3 * unit(rng);

    const std::size_t b = batch(rng);
    c.input = gcl::nn::Matrix(b, d);
    for (double& v : c.input.values()) v = unit(rng);
    if (min_relu_margin(c.net, c.input) < 1e-2) continue;

    if (kind == LossKind::bce) {
      std::bernoulli_distribution coin(0.5);
      for (std::size_t r = 0; r < b; ++r) c.bce_targets.push_back(coin(rng) ? 1.0 : 0.0);
    } else {
      c.target = c.input;
      c.include.assign(b, 1);
      if (kind == LossKind::nl_target) {
        std::bernoulli_distribution coin(0.5);
        for (std::size_t r = 0; r < b; ++r) {
          if (coin(rng)) std::fill(c.target.row(r).begin(), c.target.row(r).end(), 1.0);
        }
        // occasionally drop a row, as the "none" mode does
        if (b > 1 && coin(rng)) c.include[0] = 0;
      }
    }
    return c;
  }
}

inline double oracle_loss(const Case& c) {
  const auto out = oracle::forward(c.net, oracle::to_rows(c.input));
  if (c.kind == LossKind::bce) return oracle::bce_loss(out, c.bce_targets);
  std::vector<std::vector<double>> pred, tgt;
  const auto target_rows = oracle::to_rows(c.target);
  for (std::size_t r = 0; r < out.size(); ++r) {
    if (!c.include[r]) continue;
    pred.push_back(out[r]);
    tgt.push_back(target_rows[r]);
  }
  return oracle::euclidean_loss(pred, tgt);
}

inline gcl::nn::Gradients library_gradients(const Case& c) {
  gcl::nn::Tape tape;
  const auto out = gcl::nn::forward(c.net, c.input, &tape);
  const auto loss = c.kind == LossKind::bce
                        ? gcl::nn::bce_loss(out, c.bce_targets)
                        : gcl::nn::reconstruction_loss(out, c.target, c.include);
  return gcl::nn::backward(c.net, tape, loss.grad);
}

inline Result check(Case c, double rel_floor) {
  const auto grads = library_gradients(c);
  Result res;
  auto compare = [&](gcl::nn::Matrix& param, const gcl::nn::Matrix& grad) {
    for (std::size_t i = 0; i < param.size(); ++i) {
      const double numeric =
          oracle::central_difference(param.values()[i], [&] { return oracle_loss(c); });
      res.max_rel_error = std::max(
          res.max_rel_error, oracle::relative_error(grad.values()[i], numeric, rel_floor));
      ++res.entries;
    }
  };
  for (std::size_t l = 0; l < c.net.depth(); ++l) {
    compare(c.net.layers()[l].weights, grads[l].weights);
    compare(c.net.layers()[l].bias, grads[l].bias);
  }
  return res;
}

}  // namespace gradcheck
