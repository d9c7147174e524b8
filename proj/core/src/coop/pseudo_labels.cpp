#include "gcl/coop/pseudo_labels.hpp"

#include <algorithm>
#include <cmath>

#include "gcl/error.hpp"
#include "gcl/nn/loss.hpp"

namespace gcl::coop {

BatchMoments population_moments(std::span<const double> values) {
  if (values.empty()) return {};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  const double mean = sum / n;
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / n)};
}

std::size_t PseudoLabelSet::positives() const {
  std::size_t n = 0;
  for (double l : labels) n += l >= 0.5 ? 1 : 0;
  return n;
}

double PseudoLabelSet::positive_rate() const {
  return labels.empty() ? 0.0
                        : static_cast<double>(positives()) / static_cast<double>(labels.size());
}

GenBatchStats generator_stats_from_errors(std::vector<double> errors, double k_g) {
  GenBatchStats s;
  const auto m = population_moments(errors);
  s.per_row_error = std::move(errors);
  s.mean = m.mean;
  s.std = m.std;
  s.threshold = m.mean + k_g * m.std;
  return s;
}

GenBatchStats reconstruction_errors(const nn::Network& gen, const nn::Matrix& batch, double k_g) {
  const nn::Matrix recon = nn::forward(gen, batch);
  return generator_stats_from_errors(nn::row_distances(batch, recon), k_g);
}

namespace {

PseudoLabelSet threshold_labels(std::span<const double> values, double threshold,
                                LabelSource source) {
  PseudoLabelSet out;
  out.source = source;
  out.threshold = threshold;
  out.labels.resize(values.size());
  for (std::size_t q = 0; q < values.size(); ++q) {
    out.labels[q] = values[q] >= threshold ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace

PseudoLabelSet generator_pseudo_labels(const GenBatchStats& stats) {
  return threshold_labels(stats.per_row_error, stats.threshold, LabelSource::generator);
}

PseudoLabelSet generator_soft_labels(const GenBatchStats& stats) {
  PseudoLabelSet out;
  out.soft = true;
  out.source = LabelSource::generator;
  out.threshold = stats.threshold;
  out.labels.resize(stats.per_row_error.size());
  for (std::size_t q = 0; q < out.labels.size(); ++q) {
    out.labels[q] = stats.threshold > 0.0
                        ? std::min(1.0, stats.per_row_error[q] / stats.threshold)
                        : 1.0;
  }
  return out;
}

DiscBatchStats discriminator_stats_from_probs(std::vector<double> probs, double k_d) {
  DiscBatchStats s;
  const auto m = population_moments(probs);
  s.per_row_prob = std::move(probs);
  s.mean = m.mean;
  s.std = m.std;
  s.threshold = m.mean + k_d * m.std;
  return s;
}

PseudoLabelSet discriminator_pseudo_labels(const DiscBatchStats& stats) {
  return threshold_labels(stats.per_row_prob, stats.threshold, LabelSource::discriminator);
}

std::pair<DiscBatchStats, PseudoLabelSet> discriminator_pseudo_labels(const nn::Network& disc,
                                                                      const nn::Matrix& batch,
                                                                      double k_d) {
  const nn::Matrix out = nn::forward(disc, batch);
  if (out.cols() != 1) {
    throw Error(ErrorKind::dimension, "discriminator must produce one column, got " +
                                          out.shape_string());
  }
  std::vector<double> probs(out.values().begin(), out.values().end());
  auto stats = discriminator_stats_from_probs(std::move(probs), k_d);
  auto labels = discriminator_pseudo_labels(stats);
  return {std::move(stats), std::move(labels)};
}

void force_known_normal(PseudoLabelSet& labels, std::span<const std::uint8_t> known_normal) {
  if (known_normal.empty()) return;
  if (known_normal.size() != labels.labels.size()) {
    throw Error(ErrorKind::dimension, "force_known_normal: mask length mismatch");
  }
  for (std::size_t q = 0; q < known_normal.size(); ++q) {
    if (known_normal[q]) labels.labels[q] = 0.0;
  }
}

}  // namespace gcl::coop
