#pragma once

#include <cstdint>
#include <random>

namespace gcl {

using Rng = std::mt19937_64;

/// Derives an independent 64-bit seed for a named sub-stream of `base`
/// (splitmix64 finalizer over base and stream id). Every random consumer in
/// the library gets its own stream so adding draws in one place never shifts
/// the sequence seen by another.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

inline Rng make_rng(std::uint64_t base, std::uint64_t stream) {
  return Rng(derive_seed(base, stream));
}

// Stream ids. Values are part of the reproducibility contract.
namespace streams {
inline constexpr std::uint64_t generator_init = 1;
inline constexpr std::uint64_t discriminator_init = 2;
inline constexpr std::uint64_t negative_targets = 3;
inline constexpr std::uint64_t supervision_subset = 4;
inline constexpr std::uint64_t pretrain_generator = 10;
inline constexpr std::uint64_t pretrain_discriminator = 11;
inline constexpr std::uint64_t cooperative_shuffle = 12;
inline constexpr std::uint64_t synth_world = 20;
inline constexpr std::uint64_t synth_train = 21;
inline constexpr std::uint64_t synth_test = 22;
}  // namespace streams

}  // namespace gcl
