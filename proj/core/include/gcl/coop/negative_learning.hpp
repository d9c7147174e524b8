#pragma once

#include <cstdint>
#include <vector>

#include "gcl/coop/config.hpp"
#include "gcl/coop/pseudo_labels.hpp"
#include "gcl/data/batching.hpp"
#include "gcl/random.hpp"

namespace gcl::coop {

// Reconstruction targets for one generator step. Rows labeled normal keep
// their input as target; rows labeled anomalous get a pseudo target chosen by
// the NL mode. `include[q] == 0` drops row q from the loss (NlMode::none).
struct NlTargetBatch {
  nn::Matrix targets;
  std::vector<std::uint8_t> include;
  bool fell_back_to_ones = false;  // random_normal found no pseudo-normal row

  std::size_t included() const;
};

NlTargetBatch make_nl_targets(const nn::Matrix& batch, const PseudoLabelSet& labels, NlMode mode,
                              double gaussian_sigma, Rng& rng);

inline NlTargetBatch make_nl_targets(const data::Batch& batch, const PseudoLabelSet& labels,
                                     NlMode mode, double gaussian_sigma, std::uint64_t seed) {
  Rng rng(seed);
  return make_nl_targets(batch.matrix, labels, mode, gaussian_sigma, rng);
}

}  // namespace gcl::coop
