#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gcl/nn/matrix.hpp"

namespace gcl::nn {

struct LossResult {
  double value = 0.0;
  Matrix grad;  // dLoss / dPrediction, same shape as the prediction
};

enum class NormKind {
  euclidean,  // ||t - y||_2, the reference choice
  squared,    // ||t - y||_2^2
};

// Guard inside the square root so the gradient of ||t - y|| stays finite at
// zero residual.
inline constexpr double kNormEpsilon = 1e-12;
// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] inside BCE.
inline constexpr double kProbClamp = 1e-12;

/// Exact per-row Euclidean distance ||a_q - b_q||_2 (no epsilon).
std::vector<double> row_distances(const Matrix& a, const Matrix& b);

/// Mean over included rows of the per-row residual norm between `prediction`
/// and `target`. `include` may be empty (all rows) or hold one flag per row.
/// With no included rows the value is 0 and the gradient is all zero.
LossResult reconstruction_loss(const Matrix& prediction, const Matrix& target,
                               std::span<const std::uint8_t> include = {},
                               NormKind norm = NormKind::euclidean);

/// Binary cross-entropy between a b x 1 probability column and targets in [0, 1].
LossResult bce_loss(const Matrix& probabilities, std::span<const double> targets);

}  // namespace gcl::nn
