#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gcl/data/features.hpp"

namespace gcl::data {

struct CleanerConfig {
  double d_th = 0.70;
};

/// Keep-flags for the temporal-difference cleaner. Records must be grouped
/// per video in temporal order. The first segment of a video is always kept;
/// every later segment is kept iff its L2 distance to the immediately preceding
/// segment of the original sequence is <= d_th.
std::vector<std::uint8_t> temporal_difference_mask(std::span<const FeatureRecord> records,
                                                   const CleanerConfig& cfg);

/// Records selected by temporal_difference_mask, order preserved.
std::vector<FeatureRecord> temporal_difference_filter(std::span<const FeatureRecord> records,
                                                      const CleanerConfig& cfg);

}  // namespace gcl::data
