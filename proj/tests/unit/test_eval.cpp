#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "gcl/data/manifest.hpp"
#include "gcl/error.hpp"
#include "gcl/eval/auc.hpp"
#include "gcl/eval/scores.hpp"
#include "oracles.hpp"
#include "tmpdir.hpp"

using namespace gcl;
using namespace gcl::eval;

namespace {

using Labels = std::vector<std::uint8_t>;

data::DatasetManifest two_videos() {
  data::DatasetManifest m;
  m.d = 4;
  m.p = 16;
  m.videos.push_back({"a", "a.gclf", 2, 1, std::vector<data::FrameRange>{{16, 32}}, {}});
  m.videos.push_back({"b", "b.gclf", 2, 0, std::vector<data::FrameRange>{}, {}});
  return m;
}

}  // namespace

TEST_CASE("auc: hand examples") {
  CHECK(rank_auc(std::vector<double>{0.9, 0.8, 0.1, 0.2}, Labels{1, 1, 0, 0}) == 1.0);
  CHECK(rank_auc(std::vector<double>{0.3, 0.3, 0.3, 0.3}, Labels{1, 0, 1, 0}) == 0.5);
  CHECK(rank_auc(std::vector<double>{0.4, 0.6, 0.6, 0.9}, Labels{0, 1, 0, 1}) == 0.875);
  CHECK(rank_auc(std::vector<double>{0.9, 0.8, 0.1, 0.2}, Labels{0, 0, 1, 1}) == 0.0);
}

TEST_CASE("auc: undefined for a single class, rejects bad input") {
  try {
    rank_auc(std::vector<double>{0.1, 0.2}, Labels{1, 1});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
    CHECK(std::string(e.what()).find("undefined") != std::string::npos);
  }
  CHECK_THROWS_AS(rank_auc(std::vector<double>{0.1, 0.2}, Labels{1}), Error);
  CHECK_THROWS_AS(rank_auc(std::vector<double>{NAN, 0.2}, Labels{1, 0}), Error);
}

TEST_CASE("auc: rank statistic equals pair counting exactly on random instances") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(2, 200), levels(1, 12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const int n = size(rng);
    const bool ties = t % 2 == 0;
    const int lv = levels(rng);
    std::vector<double> s(n);
    Labels l(n);
    for (int i = 0; i < n; ++i) {
      s[i] = ties ? std::floor(u(rng) * lv) / lv : u(rng);
      l[i] = u(rng) < 0.3 ? 1 : 0;
    }
    l[0] = 1;
    l[1] = 0;
    CAPTURE(t);
    CHECK(rank_auc(s, l) == oracle::pair_counting_auc(s, l));
  }
}

TEST_CASE("auc: invariant under strictly increasing maps; complement labels give 1 - auc") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> s(60);
    Labels l(60);
    for (int i = 0; i < 60; ++i) {
      s[i] = std::round(n(rng) * 4.0) / 4.0;  // some ties
      l[i] = i % 3 == 0;
    }
    const double a = rank_auc(s, l);
    std::vector<double> mapped;
    for (double v : s) mapped.push_back(std::exp(3.0 * v) + 7.0);
    CHECK(rank_auc(mapped, l) == a);
    Labels flipped;
    for (auto v : l) flipped.push_back(v ? 0 : 1);
    CHECK(rank_auc(s, flipped) == doctest::Approx(1.0 - a).epsilon(1e-15));
  }
}

TEST_CASE("compute_auc counts classes") {
  const auto r = compute_auc(std::vector<double>{0.1, 0.2, 0.3}, Labels{0, 1, 1});
  CHECK(r.positives == 2);
  CHECK(r.negatives == 1);
  CHECK(r.auc == 1.0);
}

TEST_CASE("frame labels: ranges, union and bounds") {
  auto m = two_videos();
  const auto a = frame_labels(m, "a");
  REQUIRE(a.size() == 32);
  CHECK(std::count(a.begin(), a.end(), 1) == 16);
  CHECK(a[15] == 0);
  CHECK(a[16] == 1);
  CHECK(a[31] == 1);
  const auto b = frame_labels(m, "b");
  CHECK(std::count(b.begin(), b.end(), 1) == 0);

  m.videos[0].segments = 3;
  m.videos[0].gt_ranges = std::vector<data::FrameRange>{{16, 32}, {20, 30}, {16, 32}};
  const auto u = frame_labels(m, "a");
  CHECK(u.size() == 48);
  CHECK(std::count(u.begin(), u.end(), 1) == 16);

  m.videos[0].gt_ranges = std::vector<data::FrameRange>{{40, 60}};
  CHECK_THROWS_AS(frame_labels(m, "a"), Error);
  CHECK_THROWS_AS(frame_labels(m, "zzz"), Error);
  m.videos[1].gt_ranges.reset();
  CHECK_THROWS_AS(frame_labels(m, "b"), Error);
}

TEST_CASE("segment scores expand to frames and truncate to the true frame count") {
  const auto two = expand_to_frames(std::vector<double>{0.1, 0.9}, 16, 32);
  REQUIRE(two.size() == 32);
  CHECK(two[0] == 0.1);
  CHECK(two[15] == 0.1);
  CHECK(two[16] == 0.9);
  const auto partial = expand_to_frames(std::vector<double>{0.1, 0.2, 0.3}, 16, 35);
  REQUIRE(partial.size() == 35);
  CHECK(partial[32] == 0.3);
  CHECK(partial[34] == 0.3);
  CHECK(std::count(partial.begin(), partial.end(), 0.3) == 3);
}

TEST_CASE("evaluate series: pooled and per-video mean") {
  const auto m = two_videos();
  std::vector<ScoreSeries> s{{"a", expand_to_frames(std::vector<double>{0.2, 0.8}, 16, 32)},
                             {"b", expand_to_frames(std::vector<double>{0.1, 0.9}, 16, 32)}};
  const auto pooled = evaluate_series(s, m);
  CHECK(pooled.positives == 16);
  CHECK(pooled.negatives == 48);
  // positives all score 0.8; negatives: 16 x 0.2, 16 x 0.1 below, 16 x 0.9 above
  CHECK(pooled.auc == doctest::Approx(32.0 / 48.0).epsilon(1e-15));
  REQUIRE(pooled.per_video.size() == 2);
  CHECK(pooled.per_video[0].auc == 1.0);
  CHECK_FALSE(pooled.per_video[1].auc.has_value());

  const auto mean = evaluate_series(s, m, AucPooling::per_video_mean);
  CHECK(mean.auc == 1.0);

  const auto j = nlohmann::json::parse(auc_report_to_json(pooled));
  CHECK(j["auc"].get<double>() == pooled.auc);
  CHECK(j["positives"] == 16);
  CHECK(j["per_video"].size() == 2);
  CHECK(j["per_video"][1]["auc"].is_null());
}

TEST_CASE("score export: header-only when empty, full-precision round trip") {
  TempDir dir;
  const auto path = dir.path() / "s.csv";
  export_scores({}, path);
  {
    std::ifstream in(path);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(all == "video_id,frame,score\n");
  }

  const auto m = two_videos();
  std::vector<ScoreSeries> s{{"a", expand_to_frames(std::vector<double>{0.1, 1.0 / 3.0}, 16, 32)},
                             {"b", expand_to_frames(std::vector<double>{std::nextafter(0.5, 1.0), 2e-300}, 16, 32)}};
  export_scores(s, path, &m);
  std::ifstream in(path);
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 65);  // header + 64 rows
  const auto table = import_scores(path);
  CHECK(table.series == s);
  REQUIRE(table.labels.has_value());
  CHECK((*table.labels)[0] == frame_labels(m, "a"));

  export_scores(s, path);
  const auto unlabeled = import_scores(path);
  CHECK(unlabeled.series == s);
  CHECK_FALSE(unlabeled.labels.has_value());
}

TEST_CASE("score import rejects malformed files") {
  TempDir dir;
  const auto path = dir.path() / "bad.csv";
  std::ofstream(path) << "video_id,frame,score\na,0,notanumber\n";
  CHECK_THROWS_AS(import_scores(path), Error);
  std::ofstream(path, std::ios::trunc) << "wrong,header\n";
  CHECK_THROWS_AS(import_scores(path), Error);
  CHECK_THROWS_AS(import_scores(dir.path() / "missing.csv"), Error);
}
