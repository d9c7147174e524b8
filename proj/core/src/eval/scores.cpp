#include "gcl/eval/scores.hpp"

#include <cstdio>
#include <fstream>
#include <map>

#include "gcl/error.hpp"

namespace gcl::eval {

std::vector<double> expand_to_frames(std::span<const double> segment_scores, std::uint32_t p,
                                     std::uint64_t frames) {
  std::vector<double> out;
  if (segment_scores.empty()) return out;
  out.reserve(frames);
  for (std::uint64_t f = 0; f < frames; ++f) {
    const std::uint64_t seg = std::min<std::uint64_t>(f / p, segment_scores.size() - 1);
    out.push_back(segment_scores[seg]);
  }
  return out;
}

std::vector<ScoreSeries> series_from_segment_scores(std::span<const data::FeatureRecord> records,
                                                    std::span<const double> segment_scores,
                                                    const data::DatasetManifest& manifest) {
  if (records.size() != segment_scores.size()) {
    throw Error(ErrorKind::dimension, "score series: records and scores differ in length");
  }
  std::map<std::string, std::vector<double>> per_video;
  for (const auto& v : manifest.videos) per_video[v.id].assign(v.segments, 0.0);
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto it = per_video.find(records[i].video_id);
    if (it == per_video.end()) {
      throw Error(ErrorKind::data, "score series: video '" + records[i].video_id +
                                       "' is not in the manifest");
    }
    if (records[i].segment_index >= it->second.size()) {
      throw Error(ErrorKind::data, "score series: segment index out of range for video '" +
                                       records[i].video_id + "'");
    }
    it->second[records[i].segment_index] = segment_scores[i];
    ++seen[records[i].video_id];
  }
  std::vector<ScoreSeries> out;
  for (const auto& v : manifest.videos) {
    if (seen[v.id] != v.segments) {
      throw Error(ErrorKind::data, "score series: video '" + v.id + "' is missing segments");
    }
    out.push_back({v.id, expand_to_frames(per_video[v.id], manifest.p, v.frame_count(manifest.p))});
  }
  return out;
}

std::vector<std::uint8_t> frame_labels(const data::DatasetManifest& manifest,
                                       const std::string& video_id) {
  const auto* v = manifest.find(video_id);
  if (!v) throw Error(ErrorKind::data, "video '" + video_id + "' is not in the manifest");
  if (!v->gt_ranges) {
    throw Error(ErrorKind::data, "video '" + video_id + "' has no ground-truth ranges");
  }
  const std::uint64_t frames = v->frame_count(manifest.p);
  std::vector<std::uint8_t> labels(frames, 0);
  for (const auto& r : *v->gt_ranges) {
    if (r.end > frames || r.start > r.end) {
      throw Error(ErrorKind::data, "video '" + video_id + "': range [" + std::to_string(r.start) +
                                       "," + std::to_string(r.end) + ") exceeds " +
                                       std::to_string(frames) + " frames");
    }
    for (std::uint64_t f = r.start; f < r.end; ++f) labels[f] = 1;
  }
  return labels;
}

void export_scores(std::span<const ScoreSeries> series, const std::filesystem::path& path,
                   const data::DatasetManifest* manifest) {
  const bool with_labels = manifest && manifest->has_ground_truth();
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw Error(ErrorKind::io, "cannot write scores " + path.string());
  std::fputs(with_labels ? "video_id,frame,score,label\n" : "video_id,frame,score\n", f);
  for (const auto& s : series) {
    std::vector<std::uint8_t> labels;
    if (with_labels) labels = frame_labels(*manifest, s.video_id);
    for (std::size_t i = 0; i < s.frame_scores.size(); ++i) {
      if (with_labels) {
        std::fprintf(f, "%s,%zu,%.17g,%d\n", s.video_id.c_str(), i, s.frame_scores[i],
                     i < labels.size() ? labels[i] : 0);
      } else {
        std::fprintf(f, "%s,%zu,%.17g\n", s.video_id.c_str(), i, s.frame_scores[i]);
      }
    }
  }
  const bool ok = std::ferror(f) == 0;
  if (std::fclose(f) != 0 || !ok) throw Error(ErrorKind::io, "failed writing " + path.string());
}

ScoreTable import_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open scores " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::format, path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool with_labels = false;
  if (line == "video_id,frame,score,label") {
    with_labels = true;
  } else if (line != "video_id,frame,score") {
    throw Error(ErrorKind::format, path.string() + ": unexpected header '" + line + "'");
  }
  ScoreTable table;
  if (with_labels) table.labels.emplace();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto where = path.string() + ":" + std::to_string(line_no);
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) throw Error(ErrorKind::format, where + ": too few columns");
    const auto c3 = line.find(',', c2 + 1);
    std::string id = line.substr(0, c1);
    if (table.series.empty() || table.series.back().video_id != id) {
      table.series.push_back({id, {}});
      if (with_labels) table.labels->emplace_back();
    }
    try {
      const auto frame = std::stoull(line.substr(c1 + 1, c2 - c1 - 1));
      if (frame != table.series.back().frame_scores.size()) {
        throw Error(ErrorKind::format, where + ": frames out of order");
      }
      table.series.back().frame_scores.push_back(
          std::stod(line.substr(c2 + 1, c3 == std::string::npos ? c3 : c3 - c2 - 1)));
      if (with_labels) {
        if (c3 == std::string::npos) throw Error(ErrorKind::format, where + ": missing label");
        table.labels->back().push_back(static_cast<std::uint8_t>(std::stoi(line.substr(c3 + 1))));
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::format, where + ": malformed row");
    }
  }
  return table;
}

}  // namespace gcl::eval
