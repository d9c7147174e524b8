#include "gcl/data/features.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "gcl/error.hpp"

namespace gcl::data {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open feature file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<FeatureRecord> read_feature_file(const std::filesystem::path& path,
                                             const std::string& video_id) {
  const std::string bytes = read_all(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 16) {
    throw Error(ErrorKind::format, path.string() + ": truncated header");
  }
  if (std::memcmp(p, kFeatureMagic, 4) != 0) {
    throw Error(ErrorKind::format, path.string() + ": bad magic (expected GCLF)");
  }
  const std::uint32_t version = get_u32(p + 4);
  if (version != kFeatureVersion) {
    throw Error(ErrorKind::format,
                path.string() + ": unsupported version " + std::to_string(version));
  }
  const std::uint32_t d = get_u32(p + 8);
  const std::uint32_t count = get_u32(p + 12);
  if (d == 0) throw Error(ErrorKind::format, path.string() + ": d is zero");
  const std::uint64_t expected = 16 + static_cast<std::uint64_t>(count) * d * 4;
  if (bytes.size() < expected) {
    throw Error(ErrorKind::format, path.string() + ": truncated file (" +
                                       std::to_string(bytes.size()) + " bytes, header promises " +
                                       std::to_string(expected) + ")");
  }
  if (bytes.size() > expected) {
    throw Error(ErrorKind::format, path.string() + ": trailing bytes after payload");
  }
  std::vector<FeatureRecord> out(count);
  const unsigned char* cursor = p + 16;
  for (std::uint32_t s = 0; s < count; ++s) {
    out[s].video_id = video_id;
    out[s].segment_index = s;
    out[s].vector.resize(d);
    for (std::uint32_t k = 0; k < d; ++k, cursor += 4) {
      out[s].vector[k] = static_cast<double>(std::bit_cast<float>(get_u32(cursor)));
    }
  }
  return out;
}

void write_feature_file(const std::filesystem::path& path,
                        std::span<const FeatureRecord> records) {
  const std::uint32_t d =
      records.empty() ? 0u : static_cast<std::uint32_t>(records.front().vector.size());
  std::string out;
  out.reserve(16 + records.size() * d * 4);
  out.append(kFeatureMagic, 4);
  put_u32(out, kFeatureVersion);
  put_u32(out, d);
  put_u32(out, static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) {
    if (r.vector.size() != d) {
      throw Error(ErrorKind::dimension, path.string() + ": record of video '" + r.video_id +
                                            "' has d=" + std::to_string(r.vector.size()) +
                                            ", expected " + std::to_string(d));
    }
    for (double v : r.vector) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot write feature file " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(ErrorKind::io, "failed writing feature file " + path.string());
}

std::vector<FeatureRecord> load_features(const std::filesystem::path& dir,
                                         const DatasetManifest& manifest) {
  std::vector<FeatureRecord> all;
  all.reserve(manifest.total_segments());
  for (const auto& v : manifest.videos) {
    const auto path = dir / v.file;
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorKind::io, "missing feature file " + path.string() + " for video '" +
                                     v.id + "'");
    }
    auto recs = read_feature_file(path, v.id);
    if (!recs.empty() && recs.front().vector.size() != manifest.d) {
      throw Error(ErrorKind::dimension, path.string() + ": d=" +
                                            std::to_string(recs.front().vector.size()) +
                                            " but manifest says d=" + std::to_string(manifest.d));
    }
    if (recs.size() != v.segments) {
      throw Error(ErrorKind::format, path.string() + ": truncated file, holds " +
                                         std::to_string(recs.size()) + " segments but manifest says " +
                                         std::to_string(v.segments));
    }
    std::move(recs.begin(), recs.end(), std::back_inserter(all));
  }
  return all;
}

void write_features(const std::filesystem::path& dir, std::span<const FeatureRecord> records,
                    const DatasetManifest& manifest) {
  std::filesystem::create_directories(dir);
  std::size_t cursor = 0;
  for (const auto& v : manifest.videos) {
    const std::size_t begin = cursor;
    while (cursor < records.size() && records[cursor].video_id == v.id) ++cursor;
    if (cursor - begin != v.segments) {
      throw Error(ErrorKind::data, "write_features: video '" + v.id + "' has " +
                                       std::to_string(cursor - begin) +
                                       " contiguous records, manifest says " +
                                       std::to_string(v.segments));
    }
    write_feature_file(dir / v.file, records.subspan(begin, cursor - begin));
  }
  if (cursor != records.size()) {
    throw Error(ErrorKind::data, "write_features: records for videos not in the manifest");
  }
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

void write_features_csv(const std::filesystem::path& path, std::span<const FeatureRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write feature CSV " + path.string());
  const std::size_t d = records.empty() ? 0 : records.front().vector.size();
  out << "video_id,segment_index";
  for (std::size_t k = 0; k < d; ++k) out << ",f_" << k;
  out << '\n';
  char buf[32];
  for (const auto& r : records) {
    if (r.vector.size() != d) {
      throw Error(ErrorKind::dimension, "record " + r.video_id + "/" +
                                            std::to_string(r.segment_index) + " has d=" +
                                            std::to_string(r.vector.size()) + ", expected " +
                                            std::to_string(d));
    }
    if (r.video_id.find_first_of(",\n\"") != std::string::npos) {
      throw Error(ErrorKind::format, "video id '" + r.video_id + "' cannot be written to CSV");
    }
    out << r.video_id << ',' << r.segment_index;
    for (double v : r.vector) {
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

std::vector<FeatureRecord> load_features_csv(const std::filesystem::path& path,
                                             const DatasetManifest* manifest) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open feature CSV " + path.string());
  std::vector<FeatureRecord> out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t d = manifest ? manifest->d : 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (line_no == 1 && trim(cells[0]) == "video_id") continue;
    const auto where = path.string() + ":" + std::to_string(line_no);
    if (cells.size() < 3) throw Error(ErrorKind::format, where + ": expected id, index, features");
    FeatureRecord r;
    r.video_id = std::string(trim(cells[0]));
    const auto idx = trim(cells[1]);
    if (std::from_chars(idx.data(), idx.data() + idx.size(), r.segment_index).ec != std::errc{}) {
      throw Error(ErrorKind::format, where + ": bad segment_index");
    }
    for (std::size_t c = 2; c < cells.size(); ++c) {
      const auto cell = trim(cells[c]);
      const auto digits = cell.starts_with('+') ? cell.substr(1) : cell;
      double v = 0.0;
      const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size() || !std::isfinite(v)) {
        throw Error(ErrorKind::format, where + ": bad number '" + std::string(cell) + "'");
      }
      r.vector.push_back(v);
    }
    if (d == 0) d = r.vector.size();
    if (r.vector.size() != d) {
      throw Error(ErrorKind::dimension, where + ": d=" + std::to_string(r.vector.size()) +
                                            ", expected " + std::to_string(d));
    }
    out.push_back(std::move(r));
  }

  // Group per video (first-appearance order), then order by segment index.
  std::vector<std::string> order;
  std::map<std::string, std::vector<FeatureRecord>> groups;
  for (auto& r : out) {
    auto [it, inserted] = groups.try_emplace(r.video_id);
    if (inserted) order.push_back(r.video_id);
    it->second.push_back(std::move(r));
  }
  std::vector<FeatureRecord> grouped;
  grouped.reserve(out.size());
  const auto emit = [&](const std::string& id) {
    auto& g = groups.at(id);
    std::sort(g.begin(), g.end(),
              [](const auto& a, const auto& b) { return a.segment_index < b.segment_index; });
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g[j].segment_index != j) {
        throw Error(ErrorKind::format, path.string() + ": video '" + id +
                                           "' segment indices are not contiguous from 0");
      }
    }
    std::move(g.begin(), g.end(), std::back_inserter(grouped));
  };
  if (manifest) {
    for (const auto& v : manifest->videos) {
      auto it = groups.find(v.id);
      if (it == groups.end()) {
        throw Error(ErrorKind::data, path.string() + ": missing video '" + v.id + "'");
      }
      if (it->second.size() != v.segments) {
        throw Error(ErrorKind::format, path.string() + ": video '" + v.id + "' has " +
                                           std::to_string(it->second.size()) +
                                           " segments, manifest says " +
                                           std::to_string(v.segments));
      }
      emit(v.id);
    }
  } else {
    for (const auto& id : order) emit(id);
  }
  return grouped;
}

DatasetManifest manifest_for_records(std::span<const FeatureRecord> records, std::uint32_t p) {
  DatasetManifest m;
  m.p = p;
  m.d = records.empty() ? 0u : static_cast<std::uint32_t>(records.front().vector.size());
  for (const auto& r : records) {
    if (m.videos.empty() || m.videos.back().id != r.video_id) {
      m.videos.push_back({r.video_id, r.video_id + ".gclf", 0, {}, {}, {}});
    }
    ++m.videos.back().segments;
  }
  return m;
}

void scale_features(std::span<FeatureRecord> records, double factor) {
  for (auto& r : records) {
    for (double& v : r.vector) v *= factor;
  }
}

void quantize_to_float(std::span<FeatureRecord> records) {
  for (auto& r : records) {
    for (double& v : r.vector) v = static_cast<double>(static_cast<float>(v));
  }
}

}  // namespace gcl::data
