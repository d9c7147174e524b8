#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gcl/data/features.hpp"
#include "gcl/data/manifest.hpp"

namespace gcl::eval {

// Per-frame anomaly scores of one video.
struct ScoreSeries {
  std::string video_id;
  std::vector<double> frame_scores;

  friend bool operator==(const ScoreSeries&, const ScoreSeries&) = default;
};

/// Repeats each segment score p times and truncates (or pads with the last
/// segment's score) to exactly `frames` entries.
std::vector<double> expand_to_frames(std::span<const double> segment_scores, std::uint32_t p,
                                     std::uint64_t frames);

/// Groups per-record segment scores by video and expands them to frames, in
/// manifest order. Every manifest video must have all of its segments.
std::vector<ScoreSeries> series_from_segment_scores(std::span<const data::FeatureRecord> records,
                                                    std::span<const double> segment_scores,
                                                    const data::DatasetManifest& manifest);

/// 0/1 per frame of `video_id`: 1 inside any [start, end) ground-truth range.
std::vector<std::uint8_t> frame_labels(const data::DatasetManifest& manifest,
                                       const std::string& video_id);

// CSV with header `video_id,frame,score[,label]`, scores printed with 17
// significant digits. Labels are written when `manifest` carries ground truth.
void export_scores(std::span<const ScoreSeries> series, const std::filesystem::path& path,
                   const data::DatasetManifest* manifest = nullptr);

struct ScoreTable {
  std::vector<ScoreSeries> series;
  std::optional<std::vector<std::vector<std::uint8_t>>> labels;  // aligned with series
};

ScoreTable import_scores(const std::filesystem::path& path);

}  // namespace gcl::eval
