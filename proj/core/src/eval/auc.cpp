#include "gcl/eval/auc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "gcl/error.hpp"

namespace gcl::eval {

double rank_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::dimension, "auc: " + std::to_string(scores.size()) + " scores but " +
                                          std::to_string(labels.size()) + " labels");
  }
  std::uint64_t pos = 0;
  for (auto l : labels) pos += l ? 1 : 0;
  const std::uint64_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) {
    throw Error(ErrorKind::data, "AUC undefined: ground truth holds a single class (" +
                                     std::to_string(pos) + " positive, " + std::to_string(neg) +
                                     " negative)");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw Error(ErrorKind::numeric, "auc: non-finite score");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the positive rank sum, using midranks for tie groups; stays integral.
  std::uint64_t twice_rank_sum = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const std::uint64_t twice_midrank = (i + 1) + (j + 1);
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]]) twice_rank_sum += twice_midrank;
    }
    i = j + 1;
  }
  const std::uint64_t twice_u = twice_rank_sum - pos * (pos + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

AucReport compute_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  AucReport r;
  r.auc = rank_auc(scores, labels);
  for (auto l : labels) (l ? r.positives : r.negatives)++;
  return r;
}

AucReport evaluate_series(std::span<const ScoreSeries> series,
                          const data::DatasetManifest& manifest, AucPooling pooling) {
  std::vector<double> all_scores;
  std::vector<std::uint8_t> all_labels;
  AucReport report;
  double per_video_sum = 0.0;
  std::size_t per_video_count = 0;
  for (const auto& s : series) {
    const auto labels = frame_labels(manifest, s.video_id);
    if (labels.size() != s.frame_scores.size()) {
      throw Error(ErrorKind::dimension, "video '" + s.video_id + "' has " +
                                            std::to_string(s.frame_scores.size()) +
                                            " scores for " + std::to_string(labels.size()) +
                                            " frames");
    }
    VideoAuc v{s.video_id, std::nullopt, 0, 0};
    for (auto l : labels) (l ? v.positives : v.negatives)++;
    if (v.positives > 0 && v.negatives > 0) {
      v.auc = rank_auc(s.frame_scores, labels);
      per_video_sum += *v.auc;
      ++per_video_count;
    }
    report.per_video.push_back(v);
    all_scores.insert(all_scores.end(), s.frame_scores.begin(), s.frame_scores.end());
    all_labels.insert(all_labels.end(), labels.begin(), labels.end());
  }
  for (auto l : all_labels) (l ? report.positives : report.negatives)++;
  if (pooling == AucPooling::pooled) {
    report.auc = rank_auc(all_scores, all_labels);
  } else {
    if (per_video_count == 0) {
      throw Error(ErrorKind::data, "AUC undefined: no video holds both classes");
    }
    report.auc = per_video_sum / static_cast<double>(per_video_count);
  }
  return report;
}

std::string auc_report_to_json(const AucReport& report, bool include_per_video) {
  nlohmann::ordered_json j;
  j["auc"] = report.auc;
  j["positives"] = report.positives;
  j["negatives"] = report.negatives;
  if (include_per_video) {
    j["per_video"] = nlohmann::ordered_json::array();
    for (const auto& v : report.per_video) {
      nlohmann::ordered_json e;
      e["video_id"] = v.video_id;
      e["auc"] = v.auc ? nlohmann::ordered_json(*v.auc) : nlohmann::ordered_json(nullptr);
      e["positives"] = v.positives;
      e["negatives"] = v.negatives;
      j["per_video"].push_back(e);
    }
  }
  return j.dump(2) + "\n";
}

}  // namespace gcl::eval
