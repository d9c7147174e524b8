#include "gcl/data/batching.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "gcl/error.hpp"

namespace gcl::data {

Batch make_batch(std::span<const FeatureRecord> records, std::span<const std::size_t> indices) {
  Batch b;
  const std::size_t d = records.empty() ? 0 : records.front().vector.size();
  b.matrix = nn::Matrix(indices.size(), d);
  b.provenance.reserve(indices.size());
  b.source.assign(indices.begin(), indices.end());
  for (std::size_t q = 0; q < indices.size(); ++q) {
    const auto& r = records[indices[q]];
    if (r.vector.size() != d) {
      throw Error(ErrorKind::dimension, "make_batch: record of video '" + r.video_id +
                                            "' has d=" + std::to_string(r.vector.size()) +
                                            ", expected " + std::to_string(d));
    }
    std::copy(r.vector.begin(), r.vector.end(), b.matrix.row(q).begin());
    b.provenance.push_back({r.video_id, r.segment_index});
  }
  return b;
}

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

std::vector<Batch> shuffle_batches(std::span<const FeatureRecord> records,
                                   std::size_t batch_size, std::uint64_t seed) {
  if (records.empty()) throw Error(ErrorKind::data, "shuffle_batches: empty dataset");
  if (batch_size < 2) throw Error(ErrorKind::config, "shuffle_batches: batch size must be >= 2");
  const auto order = shuffled_order(records.size(), seed);
  std::vector<Batch> batches;
  batches.reserve((records.size() + batch_size - 1) / batch_size);
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t len = std::min(batch_size, order.size() - start);
    batches.push_back(make_batch(records, std::span(order).subspan(start, len)));
  }
  return batches;
}

nn::Matrix stack_records(std::span<const FeatureRecord> records) {
  std::vector<std::size_t> all(records.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return make_batch(records, all).matrix;
}

}  // namespace gcl::data
