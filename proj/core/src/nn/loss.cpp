#include "gcl/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gcl/error.hpp"

namespace gcl::nn {

std::vector<double> row_distances(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::dimension,
                "row_distances: shapes " + a.shape_string() + " and " + b.shape_string());
  }
  std::vector<double> out(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* x = a.row(r).data();
    const double* y = b.row(r).data();
    double s = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
      const double diff = x[c] - y[c];
      s += diff * diff;
    }
    out[r] = std::sqrt(s);
  }
  return out;
}

LossResult reconstruction_loss(const Matrix& prediction, const Matrix& target,
                               std::span<const std::uint8_t> include, NormKind norm) {
  if (!prediction.same_shape(target)) {
    throw Error(ErrorKind::dimension, "reconstruction_loss: prediction " +
                                          prediction.shape_string() + " vs target " +
                                          target.shape_string());
  }
  if (!include.empty() && include.size() != prediction.rows()) {
    throw Error(ErrorKind::dimension, "reconstruction_loss: include mask has " +
                                          std::to_string(include.size()) + " entries for " +
                                          std::to_string(prediction.rows()) + " rows");
  }
  LossResult out{0.0, Matrix(prediction.rows(), prediction.cols())};
  std::size_t active = 0;
  for (std::size_t r = 0; r < prediction.rows(); ++r) {
    if (include.empty() || include[r]) ++active;
  }
  if (active == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(active);

  for (std::size_t r = 0; r < prediction.rows(); ++r) {
    if (!include.empty() && !include[r]) continue;
    const double* y = prediction.row(r).data();
    const double* t = target.row(r).data();
    double* g = out.grad.row(r).data();
    double s = 0.0;
    for (std::size_t c = 0; c < prediction.cols(); ++c) {
      const double diff = y[c] - t[c];
      s += diff * diff;
    }
    if (norm == NormKind::euclidean) {
      out.value += std::sqrt(s);
      const double scale = inv_n / std::sqrt(s + kNormEpsilon);
      for (std::size_t c = 0; c < prediction.cols(); ++c) g[c] = (y[c] - t[c]) * scale;
    } else {
      out.value += s;
      for (std::size_t c = 0; c < prediction.cols(); ++c) g[c] = 2.0 * (y[c] - t[c]) * inv_n;
    }
  }
  out.value *= inv_n;
  return out;
}

LossResult bce_loss(const Matrix& probabilities, std::span<const double> targets) {
  if (probabilities.cols() != 1 || probabilities.rows() != targets.size()) {
    throw Error(ErrorKind::dimension, "bce_loss: probabilities " +
                                          probabilities.shape_string() + " vs " +
                                          std::to_string(targets.size()) + " targets");
  }
  LossResult out{0.0, Matrix(probabilities.rows(), 1)};
  if (targets.empty()) return out;
  const double inv_n = 1.0 / static_cast<double>(targets.size());
  for (std::size_t q = 0; q < targets.size(); ++q) {
    const double y = targets[q];
    const double p = std::clamp(probabilities(q, 0), kProbClamp, 1.0 - kProbClamp);
    out.value -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    out.grad(q, 0) = (p - y) / (p * (1.0 - p)) * inv_n;
  }
  out.value *= inv_n;
  if (!std::isfinite(out.value)) throw Error(ErrorKind::numeric, "bce_loss is not finite");
  return out;
}

}  // namespace gcl::nn
