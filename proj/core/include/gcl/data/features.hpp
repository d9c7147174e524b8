#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gcl/data/manifest.hpp"

namespace gcl::data {

/// One segment's feature vector and where it came from.
struct FeatureRecord {
  std::string video_id;
  std::uint32_t segment_index = 0;  // temporal position within the video, from 0
  std::vector<double> vector;

  friend bool operator==(const FeatureRecord&, const FeatureRecord&) = default;
};

// Binary per-video feature file ("GCLF"):
//   magic "GCLF" | u32 version = 1 | u32 d | u32 segment_count |
//   segment_count * d float32, row-major. All integers little-endian.
inline constexpr char kFeatureMagic[4] = {'G', 'C', 'L', 'F'};
inline constexpr std::uint32_t kFeatureVersion = 1;

/// Reads a single GCLF file. Records get `video_id` and segment indices 0..n-1.
std::vector<FeatureRecord> read_feature_file(const std::filesystem::path& path,
                                             const std::string& video_id);

/// Writes one video's records (in the given order) as a GCLF file.
void write_feature_file(const std::filesystem::path& path,
                        std::span<const FeatureRecord> records);

/// Loads every video named by the manifest from `dir`, in manifest order.
/// Fails naming the offending file on a missing file, truncation, a segment
/// count that disagrees with the manifest, or a d mismatch.
std::vector<FeatureRecord> load_features(const std::filesystem::path& dir,
                                         const DatasetManifest& manifest);

/// Writes one GCLF file per manifest video into `dir`. Records must be grouped
/// per video; values are stored as float32.
void write_features(const std::filesystem::path& dir, std::span<const FeatureRecord> records,
                    const DatasetManifest& manifest);

/// CSV import: one row per segment, `video_id,segment_index,f_0,...,f_{d-1}`.
/// An optional header row (first cell "video_id") is skipped. When a manifest
/// is given, d and per-video segment counts are checked against it.
std::vector<FeatureRecord> load_features_csv(const std::filesystem::path& path,
                                             const DatasetManifest* manifest = nullptr);

/// Writes records as CSV with a header row, in the layout load_features_csv
/// reads. Values use the shortest representation that parses back exactly.
void write_features_csv(const std::filesystem::path& path, std::span<const FeatureRecord> records);

/// Builds a minimal manifest (no labels, no ground truth) describing `records`.
DatasetManifest manifest_for_records(std::span<const FeatureRecord> records, std::uint32_t p);

/// Multiplies every feature value by `factor` (for foreign feature scales).
void scale_features(std::span<FeatureRecord> records, double factor);

/// Rounds values to float32 precision, matching what a GCLF round-trip stores.
void quantize_to_float(std::span<FeatureRecord> records);

}  // namespace gcl::data
