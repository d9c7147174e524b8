#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gcl::data {

// Anomalous frames [start, end): inclusive start, exclusive end.
struct FrameRange {
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

struct VideoEntry {
  std::string id;
  std::string file;  // feature file, relative to the features directory
  std::uint32_t segments = 0;
  std::optional<int> label;  // video-level: 0 normal, 1 anomalous
  std::optional<std::vector<FrameRange>> gt_ranges;
  std::optional<std::uint64_t> frames;  // true frame count; defaults to segments * p

  std::uint64_t frame_count(std::uint32_t p) const {
    return frames.value_or(static_cast<std::uint64_t>(segments) * p);
  }
  friend bool operator==(const VideoEntry&, const VideoEntry&) = default;
};

struct DatasetManifest {
  std::uint32_t d = 0;
  std::uint32_t p = 16;
  std::vector<VideoEntry> videos;

  const VideoEntry* find(const std::string& id) const;
  bool has_video_labels() const;   // every video carries a label
  bool has_ground_truth() const;   // every video carries gt_ranges
  std::size_t total_segments() const;

  /// Structural checks: d, p > 0, unique ids, frame counts consistent with
  /// segment counts, labels in {0, 1}, ranges inside the video.
  void validate() const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

std::string manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const std::string& text);

DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& m, const std::filesystem::path& path);

}  // namespace gcl::data
