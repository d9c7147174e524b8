#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gcl/data/features.hpp"
#include "gcl/nn/matrix.hpp"

namespace gcl::data {

struct SegmentRef {
  std::string video_id;
  std::uint32_t segment_index = 0;
  friend bool operator==(const SegmentRef&, const SegmentRef&) = default;
};

// A b x d block of feature vectors. `provenance[q]` and `source[q]` describe
// row q: its segment identity and its index in the record list it came from.
struct Batch {
  nn::Matrix matrix;
  std::vector<SegmentRef> provenance;
  std::vector<std::size_t> source;

  std::size_t size() const noexcept { return matrix.rows(); }
};

/// Packs records[indices[0]], records[indices[1]], ... into one batch.
Batch make_batch(std::span<const FeatureRecord> records, std::span<const std::size_t> indices);

/// Seeded permutation of all records, chunked into batches of `batch_size`
/// (the final short batch is kept). Pure function of its arguments.
std::vector<Batch> shuffle_batches(std::span<const FeatureRecord> records,
                                   std::size_t batch_size, std::uint64_t seed);

/// The permutation used by shuffle_batches.
std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed);

/// All records as one matrix, in order.
nn::Matrix stack_records(std::span<const FeatureRecord> records);

}  // namespace gcl::data
