#pragma once

#include <cstdint>
#include <vector>

#include "gcl/data/features.hpp"
#include "gcl/data/manifest.hpp"

namespace gcl::data {

// Desk-scale stand-in for extracted video features.
//
// Normal segments follow smooth AR(1) trajectories on a rank-r linear
// manifold (x = A z + c + noise). Each video has its own noise level, so some
// normal videos reconstruct poorly. Anomalies occur only inside
// anomaly-flagged videos, as one contiguous run per video: each anomalous
// segment is displaced along one of `anomaly_types` fixed directions, with
// per-segment jitter. `anomaly_on_manifold` sets how much of that direction
// lies inside span(A); the rest is orthogonal to it. With the defaults most of
// the shift stays on the manifold, so an autoencoder trained on everything
// partly learns to reconstruct anomalies.
//
// The world (A, c, anomaly directions) depends only on `seed`; the train and
// test splits sample different videos from the same world.
struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t n_videos = 200;
  std::size_t segments_per_video = 60;
  std::size_t d = 32;
  double anomaly_video_fraction = 0.15;
  double anomaly_segment_fraction = 0.30;
  std::uint32_t p = 16;

  // normal generator
  std::size_t latent_rank = 3;
  double mixing_scale = 1.0;
  double temporal_correlation = 0.97;  // AR(1) coefficient of the latent walk
  double noise_std = 0.03;             // median per-video isotropic noise
  double noise_spread = 1.6;           // log-normal spread of per-video noise

  // anomaly generator
  double anomaly_shift = 3.0;   // displacement magnitude
  double anomaly_jitter = 0.35; // relative per-segment variation of the shift
  double anomaly_on_manifold = 0.9;  // share of the displacement lying inside span(A), in [0,1)
  std::size_t anomaly_types = 1;

  void validate() const;
};

enum class SynthSplit { train, test };

struct SyntheticDataset {
  std::vector<FeatureRecord> records;     // grouped per video, temporal order
  DatasetManifest manifest;               // labels + gt_ranges for every video
  std::vector<std::uint8_t> segment_labels;  // aligned with records
};

/// Values are quantized to float32 so a write/load round-trip is exact.
/// With `require_anomalies`, a configuration that produces no anomalous
/// segment is rejected.
SyntheticDataset generate_synthetic(const SynthConfig& cfg, SynthSplit split = SynthSplit::train,
                                    bool require_anomalies = false);

/// Per-segment ground truth derived from a manifest's frame ranges: a segment
/// is anomalous when any of its frames is.
std::vector<std::uint8_t> segment_labels_from_manifest(std::span<const FeatureRecord> records,
                                                       const DatasetManifest& manifest);

}  // namespace gcl::data
