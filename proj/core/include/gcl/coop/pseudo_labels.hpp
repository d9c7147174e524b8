#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gcl/data/batching.hpp"
#include "gcl/nn/network.hpp"

namespace gcl::coop {

struct BatchMoments {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation (divides by n)
};

/// Two-pass mean and population standard deviation. Empty input gives {0, 0}.
BatchMoments population_moments(std::span<const double> values);

// Generator side: per-row reconstruction error ||f - G(f)||_2 over a batch.
struct GenBatchStats {
  std::vector<double> per_row_error;
  double mean = 0.0;  // also the batch reconstruction loss L_r
  double std = 0.0;
  double threshold = 0.0;  // mean + k_g * std
};

// Discriminator side: per-row anomaly probability over a batch.
struct DiscBatchStats {
  std::vector<double> per_row_prob;
  double mean = 0.0;
  double std = 0.0;
  double threshold = 0.0;  // mean + k_d * std
};

enum class LabelSource { generator, discriminator };

struct PseudoLabelSet {
  std::vector<double> labels;  // {0, 1}, or [0, 1] when soft
  bool soft = false;
  LabelSource source = LabelSource::generator;
  double threshold = 0.0;

  std::size_t positives() const;
  double positive_rate() const;
};

GenBatchStats reconstruction_errors(const nn::Network& gen, const nn::Matrix& batch,
                                    double k_g = 1.0);
inline GenBatchStats reconstruction_errors(const nn::Network& gen, const data::Batch& batch,
                                           double k_g = 1.0) {
  return reconstruction_errors(gen, batch.matrix, k_g);
}

/// Builds GenBatchStats from already computed errors.
GenBatchStats generator_stats_from_errors(std::vector<double> errors, double k_g);

/// label = 1 iff error >= threshold (inclusive).
PseudoLabelSet generator_pseudo_labels(const GenBatchStats& stats);

/// Soft variant: min(1, error / threshold); a zero threshold maps to 1.
PseudoLabelSet generator_soft_labels(const GenBatchStats& stats);

DiscBatchStats discriminator_stats_from_probs(std::vector<double> probs, double k_d);

/// Runs the discriminator on the batch, then label = 1 iff p >= threshold.
std::pair<DiscBatchStats, PseudoLabelSet> discriminator_pseudo_labels(const nn::Network& disc,
                                                                      const nn::Matrix& batch,
                                                                      double k_d = 0.1);
inline std::pair<DiscBatchStats, PseudoLabelSet> discriminator_pseudo_labels(
    const nn::Network& disc, const data::Batch& batch, double k_d = 0.1) {
  return discriminator_pseudo_labels(disc, batch.matrix, k_d);
}

PseudoLabelSet discriminator_pseudo_labels(const DiscBatchStats& stats);

/// Sets labels to 0 wherever `known_normal[q]` is non-zero.
void force_known_normal(PseudoLabelSet& labels, std::span<const std::uint8_t> known_normal);

}  // namespace gcl::coop
