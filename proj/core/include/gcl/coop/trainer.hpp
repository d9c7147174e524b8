#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gcl/coop/config.hpp"
#include "gcl/data/batching.hpp"
#include "gcl/data/manifest.hpp"
#include "gcl/eval/scores.hpp"
#include "gcl/nn/rmsprop.hpp"
#include "gcl/random.hpp"

namespace gcl::coop {

// Everything that evolves during training: both networks, their optimizer
// states, the negative-learning RNG and progress counters.
struct GclModel {
  GclConfig config;
  std::size_t d = 0;
  nn::Network generator;      // autoencoder, identity output
  nn::Network discriminator;  // classifier, sigmoid output
  nn::RmspropState gen_opt;
  nn::RmspropState disc_opt;
  std::size_t epoch = 0;  // completed cooperative epochs
  bool pretrained = false;
  Rng rng;  // negative-learning targets
};

/// Fresh networks (relu hidden layers) seeded from cfg.seed.
GclModel init_model(const GclConfig& cfg, std::size_t d);

struct EpochMetrics {
  std::string phase;  // "pretrain_g", "pretrain_d" or "coop"
  std::size_t epoch = 0;  // 1-based within the phase
  double recon_loss = 0.0;  // L_r: mean ||f - G(f)|| over the epoch
  double disc_loss = 0.0;   // L_D: mean discriminator BCE
  double gen_loss = 0.0;    // L_G: mean generator loss against its targets
  double gen_positive_rate = 0.0;   // share of generator pseudo-labels = 1
  double disc_positive_rate = 0.0;  // share of discriminator pseudo-labels = 1
  std::size_t skipped_gen_steps = 0;
  std::optional<double> auc;  // filled in by callers that hold ground truth
};

/// Checks that the manifest carries what the supervision mode needs.
void validate_supervision(const GclConfig& cfg, const data::DatasetManifest& manifest);

/// Per-record 1 for segments of videos whose (weak) label says "normal" and
/// which fall into the seeded labeled subset (gcl_ws only; all zero otherwise).
std::vector<std::uint8_t> known_normal_mask(std::span<const data::FeatureRecord> records,
                                            const data::DatasetManifest& manifest,
                                            const GclConfig& cfg);

/// Records used to pre-train the generator: temporally cleaned data for
/// gcl_pt / gcl_ws, normal-labeled videos for gcl_occ, nothing for gcl_b.
std::vector<data::FeatureRecord> generator_pretraining_set(
    std::span<const data::FeatureRecord> records, const data::DatasetManifest& manifest,
    const GclConfig& cfg);

/// Trains the generator with the plain reconstruction loss for
/// cfg.pretrain_epochs over shuffled batches of `records`.
std::vector<EpochMetrics> pretrain_generator(GclModel& model,
                                             std::span<const data::FeatureRecord> records);

/// Trains the discriminator on the (fixed) generator's pseudo-labels for
/// cfg.pretrain_epochs.
std::vector<EpochMetrics> pretrain_discriminator(GclModel& model,
                                                 std::span<const data::FeatureRecord> records,
                                                 std::span<const std::uint8_t> known_normal = {});

/// One pass of cross-supervision. For each batch, in order:
///   1. generator pseudo-labels from the current generator
///   2. one discriminator step on them
///   3. discriminator pseudo-labels from the updated discriminator
///   4. negative-learning targets from those labels
///   5. one generator step
/// `known_normal` is indexed by Batch::source.
EpochMetrics cooperative_epoch(GclModel& model, std::span<const data::Batch> batches,
                               std::span<const std::uint8_t> known_normal = {});

/// Batches for cooperative epoch `epoch` (0-based); pure function of the seed.
std::vector<data::Batch> epoch_batches(const GclModel& model,
                                       std::span<const data::FeatureRecord> records,
                                       std::size_t epoch);

using EpochObserver = std::function<void(const EpochMetrics&, const GclModel&)>;

/// Mode-appropriate pre-training (if not done yet), then cooperative epochs
/// until model.epoch == cfg.epochs. Resumes from a restored checkpoint.
void train(GclModel& model, std::span<const data::FeatureRecord> records,
           const data::DatasetManifest& manifest, const EpochObserver& observer = {});

/// Discriminator output per record.
std::vector<double> discriminator_scores(const nn::Network& disc,
                                         std::span<const data::FeatureRecord> records);

/// Generator reconstruction error ||f - G(f)|| per record.
std::vector<double> generator_errors(const nn::Network& gen,
                                     std::span<const data::FeatureRecord> records);

/// Discriminator scores expanded to frames, one series per manifest video.
std::vector<eval::ScoreSeries> score_segments(const nn::Network& disc,
                                              std::span<const data::FeatureRecord> records,
                                              const data::DatasetManifest& manifest);

}  // namespace gcl::coop
