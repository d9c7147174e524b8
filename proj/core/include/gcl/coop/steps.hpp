#pragma once

#include <span>

#include "gcl/coop/negative_learning.hpp"
#include "gcl/nn/loss.hpp"
#include "gcl/nn/rmsprop.hpp"

namespace gcl::coop {

/// One RMSprop step of the discriminator on binary cross-entropy against
/// `targets` (hard or soft). Returns the loss before the update.
double train_discriminator_step(nn::Network& disc, nn::RmspropState& opt, const nn::Matrix& batch,
                                std::span<const double> targets);

struct GeneratorStep {
  double loss = 0.0;        // before the update
  std::size_t rows_used = 0;
  bool skipped = false;     // every row was excluded; no update happened
};

/// One RMSprop step of the generator on the mean per-row residual norm between
/// its reconstruction and `targets.targets`, over rows with include = 1.
GeneratorStep train_generator_step(nn::Network& gen, nn::RmspropState& opt,
                                   const nn::Matrix& batch, const NlTargetBatch& targets,
                                   nn::NormKind norm = nn::NormKind::euclidean);

/// Plain reconstruction step (targets = inputs).
GeneratorStep train_autoencoder_step(nn::Network& gen, nn::RmspropState& opt,
                                     const nn::Matrix& batch,
                                     nn::NormKind norm = nn::NormKind::euclidean);

}  // namespace gcl::coop
