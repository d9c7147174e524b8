#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gcl/nn/loss.hpp"

namespace gcl::coop {

enum class SupervisionMode {
  gcl_b,    // no pre-training, fully unsupervised
  gcl_pt,   // generator pre-trained on temporally cleaned data
  gcl_occ,  // generator pre-trained on normal-labeled videos only
  gcl_ws,   // video-level labels for a fraction of the videos
};

enum class NlMode {
  ones,           // pseudo-anomalous target = all-ones vector
  random_normal,  // = a random pseudo-normal row from the same batch
  gaussian,       // = input + N(0, sigma^2) noise, resampled every step
  none,           // pseudo-anomalous rows are left out of the generator loss
};

const char* to_string(SupervisionMode m);
const char* to_string(NlMode m);
SupervisionMode supervision_mode_from_string(const std::string& s);
NlMode nl_mode_from_string(const std::string& s);

struct GclConfig {
  // Empty means "derive from d" (see default_generator_dims / default_discriminator_dims).
  std::vector<std::size_t> gen_dims;
  std::vector<std::size_t> disc_dims;

  double lr = 2e-5;
  double momentum = 0.60;
  std::size_t epochs = 15;           // cooperative epochs
  std::size_t pretrain_epochs = 15;  // each of generator / discriminator pre-training
  std::size_t batch_size = 8192;
  double k_g = 1.0;  // generator threshold: mean + k_g * std of reconstruction errors
  double k_d = 0.1;  // discriminator threshold: mean + k_d * std of probabilities
  NlMode nl_mode = NlMode::ones;
  double gaussian_sigma = 1.5;
  SupervisionMode mode = SupervisionMode::gcl_b;
  double ws_fraction = 0.0;
  double d_th = 0.70;
  std::uint64_t seed = 0;
  bool soft_labels = false;
  bool self_labels = false;
  nn::NormKind norm = nn::NormKind::euclidean;

  std::vector<std::size_t> resolved_gen_dims(std::size_t d) const;
  std::vector<std::size_t> resolved_disc_dims(std::size_t d) const;

  /// Throws ErrorKind::config listing every problem found.
  void validate(std::size_t d) const;

  friend bool operator==(const GclConfig&, const GclConfig&) = default;
};

/// FC[d, 1024, 512, 256, 512, 1024, d] with hidden widths scaled by d / 2048
/// (identical to the reference widths at d = 2048, never below 2).
std::vector<std::size_t> default_generator_dims(std::size_t d);
/// FC[d, 512, 32, 1].
std::vector<std::size_t> default_discriminator_dims(std::size_t d);

/// Settings for desk-scale runs on the synthetic suite: rank-sized generator
/// bottleneck (FC[d, 8, r, 8, d]), FC[d, 128, 32, 1] discriminator, lr 1e-3,
/// batch 256. The reference widths and batch size are far too large for a few
/// thousand 32-d segments.
GclConfig desk_preset(std::size_t d, std::size_t latent_rank);

std::string config_to_json(const GclConfig& cfg);
GclConfig config_from_json(const std::string& text);

}  // namespace gcl::coop
