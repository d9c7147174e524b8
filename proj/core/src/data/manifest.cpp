#include "gcl/data/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gcl/error.hpp"

namespace gcl::data {

using nlohmann::json;

const VideoEntry* DatasetManifest::find(const std::string& id) const {
  for (const auto& v : videos) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

bool DatasetManifest::has_video_labels() const {
  if (videos.empty()) return false;
  for (const auto& v : videos) {
    if (!v.label) return false;
  }
  return true;
}

bool DatasetManifest::has_ground_truth() const {
  if (videos.empty()) return false;
  for (const auto& v : videos) {
    if (!v.gt_ranges) return false;
  }
  return true;
}

std::size_t DatasetManifest::total_segments() const {
  std::size_t n = 0;
  for (const auto& v : videos) n += v.segments;
  return n;
}

void DatasetManifest::validate() const {
  if (d == 0) throw Error(ErrorKind::format, "manifest: d must be positive");
  if (p == 0) throw Error(ErrorKind::format, "manifest: p must be positive");
  std::set<std::string> seen;
  for (const auto& v : videos) {
    if (v.id.empty()) throw Error(ErrorKind::format, "manifest: video with empty id");
    if (!seen.insert(v.id).second) {
      throw Error(ErrorKind::format, "manifest: duplicate video id '" + v.id + "'");
    }
    if (v.segments == 0) {
      throw Error(ErrorKind::format, "manifest: video '" + v.id + "' has zero segments");
    }
    const std::uint64_t frames = v.frame_count(p);
    const std::uint64_t covered = static_cast<std::uint64_t>(v.segments) * p;
    if (frames == 0 || covered + (p - 1) < frames) {
      throw Error(ErrorKind::format, "manifest: video '" + v.id + "' has " +
                                         std::to_string(frames) + " frames but only " +
                                         std::to_string(v.segments) + " segments of p=" +
                                         std::to_string(p));
    }
    if (v.label && *v.label != 0 && *v.label != 1) {
      throw Error(ErrorKind::format, "manifest: video '" + v.id + "' label must be 0 or 1");
    }
    if (v.gt_ranges) {
      for (const auto& r : *v.gt_ranges) {
        if (r.start >= r.end || r.end > frames) {
          throw Error(ErrorKind::format,
                      "manifest: video '" + v.id + "' ground-truth range [" +
                          std::to_string(r.start) + "," + std::to_string(r.end) +
                          ") outside its " + std::to_string(frames) + " frames");
        }
      }
    }
  }
}

std::string manifest_to_json(const DatasetManifest& m) {
  json j;
  j["d"] = m.d;
  j["p"] = m.p;
  j["videos"] = json::array();
  for (const auto& v : m.videos) {
    json e{{"id", v.id}, {"file", v.file}, {"segments", v.segments}};
    if (v.frames) e["frames"] = *v.frames;
    if (v.label) e["label"] = *v.label;
    if (v.gt_ranges) {
      json ranges = json::array();
      for (const auto& r : *v.gt_ranges) ranges.push_back({r.start, r.end});
      e["gt_ranges"] = ranges;
    }
    j["videos"].push_back(e);
  }
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
  DatasetManifest m;
  try {
    const json j = json::parse(text);
    m.d = j.at("d").get<std::uint32_t>();
    m.p = j.value("p", 16u);
    for (const auto& e : j.at("videos")) {
      VideoEntry v;
      v.id = e.at("id").get<std::string>();
      v.file = e.value("file", v.id + ".gclf");
      v.segments = e.at("segments").get<std::uint32_t>();
      if (e.contains("frames")) v.frames = e.at("frames").get<std::uint64_t>();
      if (e.contains("label") && !e.at("label").is_null()) v.label = e.at("label").get<int>();
      if (e.contains("gt_ranges") && !e.at("gt_ranges").is_null()) {
        std::vector<FrameRange> ranges;
        for (const auto& r : e.at("gt_ranges")) {
          if (!r.is_array() || r.size() != 2) {
            throw Error(ErrorKind::format, "manifest: gt_ranges entries must be [start,end]");
          }
          ranges.push_back({r[0].get<std::uint64_t>(), r[1].get<std::uint64_t>()});
        }
        v.gt_ranges = std::move(ranges);
      }
      m.videos.push_back(std::move(v));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, std::string("manifest: ") + e.what());
  }
  m.validate();
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return manifest_from_json(ss.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write manifest " + path.string());
  out << manifest_to_json(m);
  if (!out) throw Error(ErrorKind::io, "failed writing manifest " + path.string());
}

}  // namespace gcl::data
