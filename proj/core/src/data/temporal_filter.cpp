#include "gcl/data/temporal_filter.hpp"

#include <cmath>

#include "gcl/error.hpp"

namespace gcl::data {

std::vector<std::uint8_t> temporal_difference_mask(std::span<const FeatureRecord> records,
                                                   const CleanerConfig& cfg) {
  if (!(cfg.d_th > 0.0)) throw Error(ErrorKind::config, "temporal filter: d_th must be > 0");
  std::vector<std::uint8_t> keep(records.size(), 1);
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& prev = records[i - 1];
    const auto& cur = records[i];
    if (cur.video_id != prev.video_id) continue;
    if (cur.vector.size() != prev.vector.size()) {
      throw Error(ErrorKind::dimension, "temporal filter: d changes inside video '" +
                                            cur.video_id + "'");
    }
    double s = 0.0;
    for (std::size_t k = 0; k < cur.vector.size(); ++k) {
      const double diff = cur.vector[k] - prev.vector[k];
      s += diff * diff;
    }
    keep[i] = std::sqrt(s) <= cfg.d_th ? 1 : 0;
  }
  return keep;
}

std::vector<FeatureRecord> temporal_difference_filter(std::span<const FeatureRecord> records,
                                                      const CleanerConfig& cfg) {
  const auto keep = temporal_difference_mask(records, cfg);
  std::vector<FeatureRecord> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (keep[i]) out.push_back(records[i]);
  }
  return out;
}

}  // namespace gcl::data
