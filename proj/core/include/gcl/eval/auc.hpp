#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gcl/data/manifest.hpp"
#include "gcl/eval/scores.hpp"

namespace gcl::eval {

struct VideoAuc {
  std::string video_id;
  std::optional<double> auc;  // absent when the video holds a single class
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

struct AucReport {
  double auc = 0.0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::vector<VideoAuc> per_video;
};

/// ROC-AUC with half credit for ties (Mann-Whitney U / (P N)), via midranks in
/// O(n log n). Throws when only one class is present.
double rank_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

AucReport compute_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

enum class AucPooling {
  pooled,          // all frames of all videos in one pool
  per_video_mean,  // mean of per-video AUCs over videos holding both classes
};

/// Frame-level AUC of `series` against the manifest's ground truth. The report
/// always carries the per-video breakdown.
AucReport evaluate_series(std::span<const ScoreSeries> series,
                          const data::DatasetManifest& manifest,
                          AucPooling pooling = AucPooling::pooled);

std::string auc_report_to_json(const AucReport& report, bool include_per_video = true);

}  // namespace gcl::eval
