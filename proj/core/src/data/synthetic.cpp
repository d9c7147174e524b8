#include "gcl/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>

#include "gcl/error.hpp"
#include "gcl/random.hpp"

namespace gcl::data {

void SynthConfig::validate() const {
  const auto bad = [](const std::string& msg) { throw Error(ErrorKind::config, "synth: " + msg); };
  if (n_videos == 0) bad("n_videos must be positive");
  if (segments_per_video == 0) bad("segments_per_video must be positive");
  if (d == 0) bad("d must be positive");
  if (p == 0) bad("p must be positive");
  if (!(anomaly_video_fraction >= 0.0 && anomaly_video_fraction <= 1.0)) {
    bad("anomaly_video_fraction must lie in [0,1]");
  }
  if (!(anomaly_segment_fraction >= 0.0 && anomaly_segment_fraction <= 1.0)) {
    bad("anomaly_segment_fraction must lie in [0,1]");
  }
  if (latent_rank == 0 || latent_rank >= d) bad("latent_rank must satisfy 0 < r < d");
  if (anomaly_types == 0 || latent_rank + anomaly_types > d) {
    bad("need 0 < anomaly_types <= d - latent_rank");
  }
  if (!(temporal_correlation >= 0.0 && temporal_correlation < 1.0)) {
    bad("temporal_correlation must lie in [0,1)");
  }
  if (!(noise_std >= 0.0) || !(noise_spread >= 0.0) || !(mixing_scale > 0.0) ||
      !(anomaly_shift >= 0.0) || !(anomaly_jitter >= 0.0)) {
    bad("scales must be non-negative");
  }
  if (!(anomaly_on_manifold >= 0.0 && anomaly_on_manifold < 1.0)) {
    bad("anomaly_on_manifold must lie in [0,1)");
  }
}

namespace {

struct World {
  std::vector<std::vector<double>> mixing;      // r columns of length d
  std::vector<double> center;                   // d
  std::vector<std::vector<double>> directions;  // anomaly_types unit vectors, orthogonal to mixing
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

World make_world(const SynthConfig& cfg) {
  Rng rng = make_rng(cfg.seed, streams::synth_world);
  std::normal_distribution<double> normal(0.0, 1.0);
  World w;
  const double col_scale = cfg.mixing_scale / std::sqrt(static_cast<double>(cfg.d));
  w.mixing.assign(cfg.latent_rank, std::vector<double>(cfg.d));
  for (auto& col : w.mixing) {
    for (double& v : col) v = normal(rng) * col_scale;
  }
  w.center.resize(cfg.d);
  for (double& v : w.center) v = 0.3 * normal(rng);

  // Orthonormal basis of span(mixing) to project anomaly directions against.
  std::vector<std::vector<double>> basis;
  const auto orthonormalize = [&](std::vector<double> v) {
    for (const auto& b : basis) {
      const double c = dot(v, b);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] -= c * b[k];
    }
    const double n = std::sqrt(dot(v, v));
    for (double& x : v) x /= n;
    return v;
  };
  for (const auto& col : w.mixing) basis.push_back(orthonormalize(col));
  for (std::size_t t = 0; t < cfg.anomaly_types; ++t) {
    std::vector<double> v(cfg.d);
    for (double& x : v) x = normal(rng);
    auto off = orthonormalize(std::move(v));
    basis.push_back(off);
    // In-span component: a random combination of the mixing columns.
    std::vector<double> in(cfg.d, 0.0);
    for (std::size_t k = 0; k < cfg.latent_rank; ++k) {
      const double coef = normal(rng);
      for (std::size_t c = 0; c < cfg.d; ++c) in[c] += coef * basis[k][c];
    }
    const double in_norm = std::sqrt(dot(in, in));
    const double f = cfg.anomaly_on_manifold;
    const double g = std::sqrt(1.0 - f * f);
    std::vector<double> u(cfg.d);
    for (std::size_t c = 0; c < cfg.d; ++c) u[c] = f * in[c] / in_norm + g * off[c];
    w.directions.push_back(std::move(u));
  }
  return w;
}

std::string video_name(SynthSplit split, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%04zu", split == SynthSplit::train ? "train" : "test", i);
  return buf;
}

}  // namespace

SyntheticDataset generate_synthetic(const SynthConfig& cfg, SynthSplit split,
                                    bool require_anomalies) {
  cfg.validate();
  const World world = make_world(cfg);
  Rng rng = make_rng(cfg.seed, split == SynthSplit::train ? streams::synth_train
                                                          : streams::synth_test);
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t m = cfg.segments_per_video;
  const auto n_anomalous_videos = static_cast<std::size_t>(
      std::llround(cfg.anomaly_video_fraction * static_cast<double>(cfg.n_videos)));
  const auto run_length = static_cast<std::size_t>(
      std::llround(cfg.anomaly_segment_fraction * static_cast<double>(m)));
  if (require_anomalies && (n_anomalous_videos == 0 || run_length == 0)) {
    throw Error(ErrorKind::config,
                "synth: anomaly fractions produce no anomalous segments but evaluation needs them");
  }

  std::vector<std::size_t> order(cfg.n_videos);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::uint8_t> video_anomalous(cfg.n_videos, 0);
  if (run_length > 0) {
    for (std::size_t i = 0; i < n_anomalous_videos; ++i) video_anomalous[order[i]] = 1;
  }

  SyntheticDataset out;
  out.manifest.d = static_cast<std::uint32_t>(cfg.d);
  out.manifest.p = cfg.p;
  out.records.reserve(cfg.n_videos * m);
  out.segment_labels.reserve(cfg.n_videos * m);

  const double rho = cfg.temporal_correlation;
  const double innovation = std::sqrt(1.0 - rho * rho);
  const std::size_t r = cfg.latent_rank;

  for (std::size_t v = 0; v < cfg.n_videos; ++v) {
    const std::string id = video_name(split, v);
    const double noise = cfg.noise_std * std::exp(cfg.noise_spread * normal(rng));
    std::vector<double> z(r);
    for (double& x : z) x = normal(rng);

    std::size_t run_start = m;
    std::size_t direction = 0;
    if (video_anomalous[v]) {
      run_start = std::uniform_int_distribution<std::size_t>(0, m - run_length)(rng);
      direction = std::uniform_int_distribution<std::size_t>(0, cfg.anomaly_types - 1)(rng);
    }

    for (std::size_t j = 0; j < m; ++j) {
      if (j > 0) {
        for (double& x : z) x = rho * x + innovation * normal(rng);
      }
      FeatureRecord rec{id, static_cast<std::uint32_t>(j), world.center};
      for (std::size_t k = 0; k < r; ++k) {
        for (std::size_t c = 0; c < cfg.d; ++c) rec.vector[c] += world.mixing[k][c] * z[k];
      }
      for (double& x : rec.vector) x += noise * normal(rng);
      const bool anomalous = j >= run_start && j < run_start + run_length;
      if (anomalous) {
        const double mag = cfg.anomaly_shift * (1.0 + cfg.anomaly_jitter * normal(rng));
        const auto& u = world.directions[direction];
        for (std::size_t c = 0; c < cfg.d; ++c) rec.vector[c] += mag * u[c];
      }
      out.records.push_back(std::move(rec));
      out.segment_labels.push_back(anomalous ? 1 : 0);
    }

    VideoEntry entry;
    entry.id = id;
    entry.file = id + ".gclf";
    entry.segments = static_cast<std::uint32_t>(m);
    entry.label = video_anomalous[v] ? 1 : 0;
    entry.gt_ranges = std::vector<FrameRange>{};
    if (video_anomalous[v]) {
      entry.gt_ranges->push_back({static_cast<std::uint64_t>(run_start) * cfg.p,
                                  static_cast<std::uint64_t>(run_start + run_length) * cfg.p});
    }
    out.manifest.videos.push_back(std::move(entry));
  }
  quantize_to_float(out.records);
  return out;
}

std::vector<std::uint8_t> segment_labels_from_manifest(std::span<const FeatureRecord> records,
                                                       const DatasetManifest& manifest) {
  std::map<std::string, const VideoEntry*> index;
  for (const auto& v : manifest.videos) index[v.id] = &v;
  std::vector<std::uint8_t> labels(records.size(), 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto it = index.find(records[i].video_id);
    if (it == index.end() || !it->second->gt_ranges) {
      throw Error(ErrorKind::data, "no ground truth for video '" + records[i].video_id + "'");
    }
    const std::uint64_t lo = static_cast<std::uint64_t>(records[i].segment_index) * manifest.p;
    const std::uint64_t hi = lo + manifest.p;
    for (const auto& range : *it->second->gt_ranges) {
      if (range.start < hi && range.end > lo) labels[i] = 1;
    }
  }
  return labels;
}

}  // namespace gcl::data
