#pragma once

#include <filesystem>
#include <string>

#include "gcl/coop/trainer.hpp"

namespace gcl::coop {

// Binary checkpoint ("GCLC", version 1, little-endian): the config, d, progress
// counters, both networks, both optimizer states and the NL RNG state.
// Doubles are stored bit-for-bit, so save/load round-trips exactly.
inline constexpr char kCheckpointMagic[4] = {'G', 'C', 'L', 'C'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize_checkpoint(const GclModel& model);
GclModel deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const GclModel& model, const std::filesystem::path& path);
GclModel load_checkpoint(const std::filesystem::path& path);

}  // namespace gcl::coop
