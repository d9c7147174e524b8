#pragma once

// Reference computations used by the tests. Each one is written out directly
// (nested loops, brute force) and shares no code with the library beyond the
// plain data types it reads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "gcl/nn/matrix.hpp"
#include "gcl/nn/network.hpp"

namespace oracle {

inline double activate(gcl::nn::Activation a, double z) {
  switch (a) {
    case gcl::nn::Activation::relu:
      return z > 0.0 ? z : 0.0;
    case gcl::nn::Activation::sigmoid:
      return 1.0 / (1.0 + std::exp(-z));
    case gcl::nn::Activation::identity:
      return z;
  }
  return z;
}

// Layer-by-layer evaluation with explicit index loops.
inline std::vector<std::vector<double>> forward(const gcl::nn::Network& net,
                                                const std::vector<std::vector<double>>& x) {
  auto cur = x;
  for (const auto& layer : net.layers()) {
    const std::size_t in = layer.weights.rows(), out = layer.weights.cols();
    std::vector<std::vector<double>> next(cur.size(), std::vector<double>(out));
    for (std::size_t r = 0; r < cur.size(); ++r) {
      for (std::size_t j = 0; j < out; ++j) {
        double z = layer.bias(0, j);
        for (std::size_t i = 0; i < in; ++i) z += cur[r][i] * layer.weights(i, j);
        next[r][j] = activate(layer.activation, z);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

inline std::vector<std::vector<double>> to_rows(const gcl::nn::Matrix& m) {
  std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
  return out;
}

// Scalar losses over plain nested vectors.
inline double euclidean_loss(const std::vector<std::vector<double>>& pred,
                             const std::vector<std::vector<double>>& target) {
  double total = 0.0;
  for (std::size_t r = 0; r < pred.size(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < pred[r].size(); ++c) {
      const double diff = target[r][c] - pred[r][c];
      s += diff * diff;
    }
    total += std::sqrt(s);
  }
  return total / static_cast<double>(pred.size());
}

inline double bce_loss(const std::vector<std::vector<double>>& prob,
                       const std::vector<double>& target) {
  double total = 0.0;
  for (std::size_t r = 0; r < prob.size(); ++r) {
    const double p = prob[r][0];
    total -= target[r] * std::log(p) + (1.0 - target[r]) * std::log(1.0 - p);
  }
  return total / static_cast<double>(prob.size());
}

// Central finite difference of `loss` with respect to one parameter entry.
// The entry is perturbed in place and restored.
inline double central_difference(double& param, const std::function<double()>& loss,
                                 double h = 1e-4) {
  const double saved = param;
  param = saved + h;
  const double up = loss();
  param = saved - h;
  const double down = loss();
  param = saved;
  return (up - down) / (2.0 * h);
}

// Relative error with a floor on the denominator so entries whose true
// gradient is ~0 are compared absolutely.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), floor});
}

// Direct mean + k * population std.
inline double threshold(const std::vector<double>& v, double k) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  return mean + k * std::sqrt(var);
}

// O(n^2) Mann-Whitney AUC as an exact rational: numerator counts 2 per win and
// 1 per tie, so the result is (wins + ties/2) / (P * N) with one division.
inline double pair_counting_auc(std::span<const double> scores,
                                std::span<const std::uint8_t> labels) {
  std::uint64_t twice = 0, pos = 0, neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) (labels[i] ? pos : neg) += 1;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      if (scores[i] > scores[j]) twice += 2;
      else if (scores[i] == scores[j]) twice += 1;
    }
  }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

}  // namespace oracle
