#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "gcl/data/batching.hpp"
#include "gcl/data/features.hpp"
#include "gcl/data/manifest.hpp"
#include "gcl/data/synthetic.hpp"
#include "gcl/data/temporal_filter.hpp"
#include "gcl/error.hpp"
#include "tmpdir.hpp"

using namespace gcl;
using namespace gcl::data;
namespace fs = std::filesystem;

namespace {

std::vector<FeatureRecord> make_video(const std::string& id, std::size_t n, std::size_t d,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<FeatureRecord> out;
  for (std::size_t j = 0; j < n; ++j) {
    FeatureRecord r{id, static_cast<std::uint32_t>(j), {}};
    for (std::size_t k = 0; k < d; ++k) r.vector.push_back(u(rng));
    out.push_back(std::move(r));
  }
  return out;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ErrorKind error_kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::state;
}

}  // namespace

TEST_CASE("feature file: one video of 3 segments loads as indices 0,1,2") {
  TempDir dir;
  auto recs = make_video("v0", 3, 4, 1);
  auto m = manifest_for_records(recs, 16);
  write_features(dir.path(), recs, m);
  const auto loaded = load_features(dir.path(), m);
  REQUIRE(loaded.size() == 3);
  for (std::uint32_t j = 0; j < 3; ++j) {
    CHECK(loaded[j].video_id == "v0");
    CHECK(loaded[j].segment_index == j);
    CHECK(loaded[j].vector == recs[j].vector);
  }
}

TEST_CASE("feature file: write(load(x)) is byte-identical") {
  TempDir dir;
  auto recs = make_video("a", 5, 7, 2);
  auto more = make_video("b", 2, 7, 3);
  recs.insert(recs.end(), more.begin(), more.end());
  const auto m = manifest_for_records(recs, 16);
  write_features(dir.path() / "one", recs, m);
  const auto loaded = load_features(dir.path() / "one", m);
  write_features(dir.path() / "two", loaded, m);
  for (const auto& v : m.videos) {
    CHECK(read_bytes(dir.path() / "one" / v.file) == read_bytes(dir.path() / "two" / v.file));
  }
}

TEST_CASE("feature file: header layout is little-endian GCLF") {
  TempDir dir;
  const auto recs = make_video("v", 2, 3, 4);
  write_feature_file(dir.path() / "v.gclf", recs);
  const auto bytes = read_bytes(dir.path() / "v.gclf");
  REQUIRE(bytes.size() == 16 + 2 * 3 * 4);
  CHECK(bytes.substr(0, 4) == "GCLF");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);
  CHECK(static_cast<unsigned char>(bytes[8]) == 3);
  CHECK(static_cast<unsigned char>(bytes[12]) == 2);
}

TEST_CASE("feature file: truncation, count mismatch, d mismatch and missing file") {
  TempDir dir;
  auto recs = make_video("v", 10, 4, 5);
  auto m = manifest_for_records(recs, 16);
  write_features(dir.path(), recs, m);
  const fs::path file = dir.path() / m.videos[0].file;

  SUBCASE("manifest says 10, file holds 9") {
    write_feature_file(file, std::span(recs).first(9));
    try {
      load_features(dir.path(), m);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::format);
      CHECK(std::string(e.what()).find(m.videos[0].file) != std::string::npos);
    }
  }
  SUBCASE("file cut short mid-payload") {
    const auto bytes = read_bytes(file);
    std::ofstream(file, std::ios::binary | std::ios::trunc).write(bytes.data(), bytes.size() - 5);
    CHECK(error_kind_of([&] { load_features(dir.path(), m); }) == ErrorKind::format);
  }
  SUBCASE("d mismatch") {
    m.d = 5;
    try {
      load_features(dir.path(), m);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::dimension);
      CHECK(std::string(e.what()).find(m.videos[0].file) != std::string::npos);
    }
  }
  SUBCASE("missing file") {
    fs::remove(file);
    CHECK(error_kind_of([&] { load_features(dir.path(), m); }) == ErrorKind::io);
  }
  SUBCASE("bad magic") {
    auto bytes = read_bytes(file);
    bytes[0] = 'X';
    std::ofstream(file, std::ios::binary | std::ios::trunc).write(bytes.data(), bytes.size());
    CHECK(error_kind_of([&] { load_features(dir.path(), m); }) == ErrorKind::format);
  }
}

TEST_CASE("csv features: header optional, rows regrouped per video in segment order") {
  TempDir dir;
  const fs::path p = dir.path() / "f.csv";
  {
    std::ofstream out(p);
    out << "video_id,segment_index,f0,f1\n";
    out << "b,1,0.5,0.25\n";
    out << "a,0,1,2\n";
    out << "b,0,3,4\n";
  }
  const auto recs = load_features_csv(p);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].video_id == "b");
  CHECK(recs[0].segment_index == 0);
  CHECK(recs[1].segment_index == 1);
  CHECK(recs[1].vector == std::vector<double>{0.5, 0.25});
  CHECK(recs[2].video_id == "a");

  DatasetManifest m;
  m.d = 3;
  m.videos = {{"a", "", 1, {}, {}, {}}, {"b", "", 2, {}, {}, {}}};
  CHECK_THROWS_AS(load_features_csv(p, &m), Error);
}

TEST_CASE("csv features: write then load is exact") {
  TempDir dir;
  const fs::path p = dir.path() / "w.csv";
  std::vector<FeatureRecord> recs{{"v1", 0, {0.1, -1.0 / 3.0, 1e-310}},
                                  {"v1", 1, {std::nextafter(1.0, 2.0), 0.0, -0.0}},
                                  {"v2", 0, {12345.678, 2.5e300, -7.0}}};
  write_features_csv(p, recs);
  CHECK(load_features_csv(p) == recs);

  recs[1].vector.pop_back();
  CHECK(error_kind_of([&] { write_features_csv(p, recs); }) == ErrorKind::dimension);
}

TEST_CASE("manifest: json round trip and validation") {
  DatasetManifest m;
  m.d = 8;
  m.p = 16;
  m.videos.push_back({"v1", "v1.gclf", 3, 1, std::vector<FrameRange>{{16, 32}}, 35});
  m.videos.push_back({"v2", "v2.gclf", 2, 0, std::vector<FrameRange>{}, {}});
  m.validate();
  CHECK(manifest_from_json(manifest_to_json(m)) == m);
  CHECK(m.has_video_labels());
  CHECK(m.has_ground_truth());
  CHECK(m.total_segments() == 5);
  CHECK(m.videos[0].frame_count(m.p) == 35);
  CHECK(m.videos[1].frame_count(m.p) == 32);

  SUBCASE("range past the end of the video") {
    m.videos[1].gt_ranges = std::vector<FrameRange>{{0, 33}};
    CHECK_THROWS_AS(m.validate(), Error);
  }
  SUBCASE("more frames than segments can cover") {
    m.videos[0].frames = 3 * 16 + 16;
    CHECK_THROWS_AS(m.validate(), Error);
  }
  SUBCASE("duplicate id") {
    m.videos[1].id = "v1";
    CHECK_THROWS_AS(m.validate(), Error);
  }
  SUBCASE("bad json") {
    CHECK_THROWS_AS(manifest_from_json("{\"d\": 4"), Error);
    CHECK_THROWS_AS(manifest_from_json("{\"p\": 4, \"videos\": []}"), Error);
  }
}

TEST_CASE("shuffle: 5 records with b=2 give batches of 2, 2, 1") {
  const auto recs = make_video("v", 5, 2, 6);
  const auto batches = shuffle_batches(recs, 2, 9);
  REQUIRE(batches.size() == 3);
  CHECK(batches[0].size() == 2);
  CHECK(batches[1].size() == 2);
  CHECK(batches[2].size() == 1);
}

TEST_CASE("shuffle preserves the record multiset and aligns provenance with rows") {
  auto recs = make_video("a", 13, 3, 7);
  auto more = make_video("b", 8, 3, 8);
  recs.insert(recs.end(), more.begin(), more.end());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::multiset<std::pair<std::string, std::uint32_t>> seen;
    for (const auto& b : shuffle_batches(recs, 4, seed)) {
      REQUIRE(b.provenance.size() == b.size());
      REQUIRE(b.source.size() == b.size());
      for (std::size_t r = 0; r < b.size(); ++r) {
        const auto& orig = recs[b.source[r]];
        CHECK(b.provenance[r].video_id == orig.video_id);
        CHECK(b.provenance[r].segment_index == orig.segment_index);
        CHECK(std::equal(orig.vector.begin(), orig.vector.end(), b.matrix.row(r).begin()));
        seen.insert({orig.video_id, orig.segment_index});
      }
    }
    std::multiset<std::pair<std::string, std::uint32_t>> expect;
    for (const auto& r : recs) expect.insert({r.video_id, r.segment_index});
    CHECK(seen == expect);
  }
}

TEST_CASE("shuffle is a pure function of the seed; different seeds permute differently") {
  const auto recs = make_video("v", 40, 2, 1);
  auto order_of = [&](std::uint64_t seed) {
    std::vector<std::size_t> o;
    for (const auto& b : shuffle_batches(recs, 7, seed)) o.insert(o.end(), b.source.begin(), b.source.end());
    return o;
  };
  for (std::uint64_t s = 0; s < 10; ++s) {
    CHECK(order_of(s) == order_of(s));
    CHECK(order_of(s) != order_of(s + 100));
  }
  // the permutation mixes videos: it is not the identity
  auto o = order_of(0);
  CHECK_FALSE(std::is_sorted(o.begin(), o.end()));
}

TEST_CASE("shuffle rejects an empty dataset and batch sizes below 2") {
  CHECK_THROWS_AS(shuffle_batches({}, 4, 0), Error);
  const auto recs = make_video("v", 3, 2, 1);
  CHECK_THROWS_AS(shuffle_batches(recs, 1, 0), Error);
}

TEST_CASE("temporal filter: e1 then 2e1 at d_th 0.70 drops the second segment") {
  std::vector<FeatureRecord> recs{{"v", 0, {1.0, 0.0}}, {"v", 1, {2.0, 0.0}}};
  const auto kept = temporal_difference_filter(recs, {0.70});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].segment_index == 0);
  CHECK(temporal_difference_filter(recs, {1.0}).size() == 2);  // distance 1.0 <= 1.0
}

TEST_CASE("temporal filter: identical segments and a huge threshold keep everything") {
  std::vector<FeatureRecord> same(5, FeatureRecord{"v", 0, {0.5, 0.5}});
  for (std::uint32_t j = 0; j < 5; ++j) same[j].segment_index = j;
  CHECK(temporal_difference_filter(same, {0.7}).size() == 5);
  const auto recs = make_video("w", 20, 4, 3);
  CHECK(temporal_difference_filter(recs, {1e300}) == recs);
}

TEST_CASE("temporal filter compares with the original predecessor, per video") {
  // 0 -> 5 (jump, dropped) -> 5.1 (close to the dropped one: kept)
  std::vector<FeatureRecord> recs{{"v", 0, {0.0}}, {"v", 1, {5.0}}, {"v", 2, {5.1}},
                                  {"w", 0, {100.0}}, {"w", 1, {100.2}}};
  const auto mask = temporal_difference_mask(recs, {0.7});
  CHECK(mask == std::vector<std::uint8_t>{1, 0, 1, 1, 1});
}

TEST_CASE("temporal filter mask is idempotent on the original distances") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 0.4);
  std::vector<FeatureRecord> recs;
  for (std::uint32_t j = 0; j < 200; ++j) recs.push_back({"v", j, {n(rng), n(rng), n(rng)}});
  const auto mask = temporal_difference_mask(recs, {0.7});
  // applying the same rule again to the full sequence and intersecting changes nothing
  auto again = temporal_difference_mask(recs, {0.7});
  for (std::size_t i = 0; i < mask.size(); ++i) again[i] = again[i] && mask[i];
  CHECK(again == mask);
  // every dropped segment really exceeds the threshold against its original predecessor
  for (std::size_t i = 1; i < recs.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < 3; ++k) s += std::pow(recs[i].vector[k] - recs[i - 1].vector[k], 2);
    CHECK((mask[i] == 1) == (std::sqrt(s) <= 0.7));
  }
}

TEST_CASE("synthetic: no anomalous videos means all labels 0") {
  SynthConfig c;
  c.n_videos = 20;
  c.anomaly_video_fraction = 0.0;
  const auto ds = generate_synthetic(c);
  for (auto l : ds.segment_labels) CHECK(l == 0);
  CHECK_THROWS_AS(generate_synthetic(c, SynthSplit::train, true), Error);
}

TEST_CASE("synthetic: anomaly rate is close to the configured product over 5 seeds") {
  SynthConfig c;
  const double expect = c.anomaly_video_fraction * c.anomaly_segment_fraction;
  for (std::uint64_t s = 0; s < 5; ++s) {
    c.seed = s;
    const auto ds = generate_synthetic(c);
    double pos = 0.0;
    for (auto l : ds.segment_labels) pos += l;
    const double rate = pos / static_cast<double>(ds.segment_labels.size());
    CAPTURE(s);
    CHECK(std::abs(rate - expect) <= 0.2 * expect);
  }
}

TEST_CASE("synthetic: determinism, layout and ground truth consistency") {
  SynthConfig c;
  c.n_videos = 30;
  c.seed = 4;
  const auto a = generate_synthetic(c);
  const auto b = generate_synthetic(c);
  CHECK(a.records == b.records);
  CHECK(a.manifest == b.manifest);
  const auto test = generate_synthetic(c, SynthSplit::test);
  CHECK(test.records != a.records);

  REQUIRE(a.records.size() == c.n_videos * c.segments_per_video);
  a.manifest.validate();
  CHECK(a.manifest.has_ground_truth());
  CHECK(a.manifest.has_video_labels());
  CHECK(segment_labels_from_manifest(a.records, a.manifest) == a.segment_labels);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].segment_index == i % c.segments_per_video);
    CHECK(a.records[i].vector.size() == c.d);
  }
  // anomalies form one contiguous run inside each anomalous video
  for (std::size_t v = 0; v < c.n_videos; ++v) {
    int starts = 0;
    for (std::size_t j = 0; j < c.segments_per_video; ++j) {
      const auto l = a.segment_labels[v * c.segments_per_video + j];
      const auto prev = j == 0 ? 0 : a.segment_labels[v * c.segments_per_video + j - 1];
      if (l && !prev) ++starts;
    }
    CHECK(starts <= 1);
    CHECK((starts == 1) == (a.manifest.videos[v].label == 1));
  }
}

TEST_CASE("synthetic: anomalies sit further from the normal manifold than normal segments") {
  // Normal subspace estimated from the normal segments (top-r principal
  // directions); anomalies should leave a larger projection residual.
  SynthConfig c;
  c.seed = 1;
  const auto ds = generate_synthetic(c);
  // mean of normal segments
  std::vector<double> mean(c.d, 0.0);
  double n_norm = 0.0;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    if (ds.segment_labels[i]) continue;
    for (std::size_t k = 0; k < c.d; ++k) mean[k] += ds.records[i].vector[k];
    n_norm += 1.0;
  }
  for (double& m : mean) m /= n_norm;
  // covariance of normal segments and its top-r eigenvectors by deflated power iteration
  std::vector<std::vector<double>> cov(c.d, std::vector<double>(c.d, 0.0));
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    if (ds.segment_labels[i]) continue;
    for (std::size_t a = 0; a < c.d; ++a)
      for (std::size_t b = 0; b < c.d; ++b)
        cov[a][b] += (ds.records[i].vector[a] - mean[a]) * (ds.records[i].vector[b] - mean[b]);
  }
  std::vector<std::vector<double>> basis;
  std::mt19937_64 rng(0);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t e = 0; e < c.latent_rank; ++e) {
    std::vector<double> v(c.d);
    for (double& x : v) x = n(rng);
    for (int it = 0; it < 300; ++it) {
      std::vector<double> w(c.d, 0.0);
      for (std::size_t a = 0; a < c.d; ++a)
        for (std::size_t b = 0; b < c.d; ++b) w[a] += cov[a][b] * v[b];
      for (const auto& u : basis) {
        double dot = 0.0;
        for (std::size_t k = 0; k < c.d; ++k) dot += w[k] * u[k];
        for (std::size_t k = 0; k < c.d; ++k) w[k] -= dot * u[k];
      }
      double norm = 0.0;
      for (double x : w) norm += x * x;
      norm = std::sqrt(norm);
      for (std::size_t k = 0; k < c.d; ++k) v[k] = w[k] / norm;
    }
    basis.push_back(v);
  }
  auto residual = [&](const std::vector<double>& x) {
    std::vector<double> r(c.d);
    for (std::size_t k = 0; k < c.d; ++k) r[k] = x[k] - mean[k];
    for (const auto& u : basis) {
      double dot = 0.0;
      for (std::size_t k = 0; k < c.d; ++k) dot += r[k] * u[k];
      for (std::size_t k = 0; k < c.d; ++k) r[k] -= dot * u[k];
    }
    double s = 0.0;
    for (double x : r) s += x * x;
    return std::sqrt(s);
  };
  double res_norm = 0.0, res_anom = 0.0, n_anom = 0.0;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const double r = residual(ds.records[i].vector);
    if (ds.segment_labels[i]) {
      res_anom += r;
      n_anom += 1.0;
    } else {
      res_norm += r;
    }
  }
  CHECK(res_anom / n_anom > res_norm / n_norm);
}

TEST_CASE("synthetic config validation") {
  SynthConfig c;
  c.anomaly_video_fraction = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.latent_rank = c.d;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.anomaly_on_manifold = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("scale and quantize helpers") {
  auto recs = make_video("v", 2, 3, 1);
  const auto orig = recs;
  scale_features(recs, 2.0);
  CHECK(recs[0].vector[1] == 2.0 * orig[0].vector[1]);
  std::vector<FeatureRecord> q{{"v", 0, {0.1}}};
  quantize_to_float(q);
  CHECK(q[0].vector[0] == static_cast<double>(0.1f));
}
