#include "gcl/coop/trainer.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "gcl/coop/negative_learning.hpp"
#include "gcl/coop/pseudo_labels.hpp"
#include "gcl/coop/steps.hpp"
#include "gcl/data/temporal_filter.hpp"
#include "gcl/error.hpp"

namespace gcl::coop {

namespace {

std::vector<nn::Activation> hidden_relu(std::size_t layers, nn::Activation last) {
  std::vector<nn::Activation> acts(layers, nn::Activation::relu);
  acts.back() = last;
  return acts;
}

std::vector<std::uint8_t> gather_mask(std::span<const std::uint8_t> mask,
                                      std::span<const std::size_t> source) {
  if (mask.empty()) return {};
  std::vector<std::uint8_t> out(source.size());
  for (std::size_t q = 0; q < source.size(); ++q) out[q] = mask[source[q]];
  return out;
}

constexpr std::size_t kScoreChunk = 4096;

template <typename RowFn>
std::vector<double> map_in_chunks(std::span<const data::FeatureRecord> records, RowFn&& fn) {
  std::vector<double> out;
  out.reserve(records.size());
  for (std::size_t start = 0; start < records.size(); start += kScoreChunk) {
    const std::size_t len = std::min(kScoreChunk, records.size() - start);
    std::vector<std::size_t> idx(len);
    std::iota(idx.begin(), idx.end(), start);
    const auto chunk = fn(data::make_batch(records, idx).matrix);
    out.insert(out.end(), chunk.begin(), chunk.end());
  }
  return out;
}

}  // namespace

GclModel init_model(const GclConfig& cfg, std::size_t d) {
  cfg.validate(d);
  GclModel m;
  m.config = cfg;
  m.d = d;
  const auto g = cfg.resolved_gen_dims(d);
  const auto dd = cfg.resolved_disc_dims(d);
  m.generator = nn::init_network(g, hidden_relu(g.size() - 1, nn::Activation::identity),
                                 derive_seed(cfg.seed, streams::generator_init));
  m.discriminator = nn::init_network(dd, hidden_relu(dd.size() - 1, nn::Activation::sigmoid),
                                     derive_seed(cfg.seed, streams::discriminator_init));
  const nn::RmspropOptions opts{cfg.lr, cfg.momentum, 0.99, 1e-8};
  m.gen_opt = nn::RmspropState(m.generator, opts);
  m.disc_opt = nn::RmspropState(m.discriminator, opts);
  m.rng = make_rng(cfg.seed, streams::negative_targets);
  return m;
}

void validate_supervision(const GclConfig& cfg, const data::DatasetManifest& manifest) {
  const bool needs_labels =
      cfg.mode == SupervisionMode::gcl_occ ||
      (cfg.mode == SupervisionMode::gcl_ws && cfg.ws_fraction > 0.0);
  if (needs_labels && !manifest.has_video_labels()) {
    throw Error(ErrorKind::config, std::string("mode ") + to_string(cfg.mode) +
                                       " needs a video label for every manifest entry");
  }
}

std::vector<std::uint8_t> known_normal_mask(std::span<const data::FeatureRecord> records,
                                            const data::DatasetManifest& manifest,
                                            const GclConfig& cfg) {
  std::vector<std::uint8_t> mask(records.size(), 0);
  if (cfg.mode != SupervisionMode::gcl_ws || cfg.ws_fraction <= 0.0) return mask;
  validate_supervision(cfg, manifest);
  const std::size_t n = manifest.videos.size();
  const auto labeled = static_cast<std::size_t>(
      std::llround(cfg.ws_fraction * static_cast<double>(n)));
  const auto order = data::shuffled_order(n, derive_seed(cfg.seed, streams::supervision_subset));
  std::set<std::string> normal_ids;
  for (std::size_t i = 0; i < labeled; ++i) {
    const auto& v = manifest.videos[order[i]];
    if (v.label && *v.label == 0) normal_ids.insert(v.id);
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    mask[i] = normal_ids.count(records[i].video_id) ? 1 : 0;
  }
  return mask;
}

std::vector<data::FeatureRecord> generator_pretraining_set(
    std::span<const data::FeatureRecord> records, const data::DatasetManifest& manifest,
    const GclConfig& cfg) {
  switch (cfg.mode) {
    case SupervisionMode::gcl_b:
      return {};
    case SupervisionMode::gcl_pt:
    case SupervisionMode::gcl_ws: {
      auto kept = data::temporal_difference_filter(records, data::CleanerConfig{cfg.d_th});
      if (kept.empty()) {
        throw Error(ErrorKind::data,
                    "temporal-difference cleaning retained no segments; try a larger --dth");
      }
      return kept;
    }
    case SupervisionMode::gcl_occ: {
      validate_supervision(cfg, manifest);
      std::set<std::string> normal;
      for (const auto& v : manifest.videos) {
        if (v.label && *v.label == 0) normal.insert(v.id);
      }
      std::vector<data::FeatureRecord> kept;
      for (const auto& r : records) {
        if (normal.count(r.video_id)) kept.push_back(r);
      }
      if (kept.empty()) {
        throw Error(ErrorKind::data, "gcl_occ: no normal-labeled videos to pre-train on");
      }
      return kept;
    }
  }
  return {};
}

std::vector<EpochMetrics> pretrain_generator(GclModel& model,
                                             std::span<const data::FeatureRecord> records) {
  std::vector<EpochMetrics> metrics;
  if (records.empty()) throw Error(ErrorKind::data, "pretrain_generator: no records");
  const auto& cfg = model.config;
  const std::uint64_t base = derive_seed(cfg.seed, streams::pretrain_generator);
  for (std::size_t e = 0; e < cfg.pretrain_epochs; ++e) {
    EpochMetrics m;
    m.phase = "pretrain_g";
    m.epoch = e + 1;
    double weighted = 0.0;
    for (const auto& batch : data::shuffle_batches(records, cfg.batch_size, derive_seed(base, e))) {
      const auto step = train_autoencoder_step(model.generator, model.gen_opt, batch.matrix, cfg.norm);
      weighted += step.loss * static_cast<double>(batch.size());
    }
    m.gen_loss = weighted / static_cast<double>(records.size());
    m.recon_loss = cfg.norm == nn::NormKind::euclidean ? m.gen_loss : 0.0;
    metrics.push_back(m);
  }
  return metrics;
}

std::vector<EpochMetrics> pretrain_discriminator(GclModel& model,
                                                 std::span<const data::FeatureRecord> records,
                                                 std::span<const std::uint8_t> known_normal) {
  std::vector<EpochMetrics> metrics;
  if (records.empty()) throw Error(ErrorKind::data, "pretrain_discriminator: no records");
  const auto& cfg = model.config;
  const std::uint64_t base = derive_seed(cfg.seed, streams::pretrain_discriminator);
  for (std::size_t e = 0; e < cfg.pretrain_epochs; ++e) {
    EpochMetrics m;
    m.phase = "pretrain_d";
    m.epoch = e + 1;
    double recon = 0.0, disc = 0.0, positives = 0.0;
    for (const auto& batch : data::shuffle_batches(records, cfg.batch_size, derive_seed(base, e))) {
      const auto stats = reconstruction_errors(model.generator, batch.matrix, cfg.k_g);
      auto labels = cfg.soft_labels ? generator_soft_labels(stats) : generator_pseudo_labels(stats);
      force_known_normal(labels, gather_mask(known_normal, batch.source));
      const double b = static_cast<double>(batch.size());
      disc += b * train_discriminator_step(model.discriminator, model.disc_opt, batch.matrix,
                                           labels.labels);
      recon += b * stats.mean;
      positives += static_cast<double>(labels.positives());
    }
    const double n = static_cast<double>(records.size());
    m.recon_loss = recon / n;
    m.disc_loss = disc / n;
    m.gen_positive_rate = positives / n;
    metrics.push_back(m);
  }
  return metrics;
}

EpochMetrics cooperative_epoch(GclModel& model, std::span<const data::Batch> batches,
                               std::span<const std::uint8_t> known_normal) {
  const auto& cfg = model.config;
  EpochMetrics m;
  m.phase = "coop";
  m.epoch = model.epoch + 1;
  double rows = 0.0, recon = 0.0, disc = 0.0, gen = 0.0, gen_rows = 0.0;
  double gen_pos = 0.0, disc_pos = 0.0;
  for (const auto& batch : batches) {
    const auto forced = gather_mask(known_normal, batch.source);
    const double b = static_cast<double>(batch.size());

    // (1) generator pseudo-labels from the generator as it is now
    const auto gstats = reconstruction_errors(model.generator, batch.matrix, cfg.k_g);
    auto glabels = generator_pseudo_labels(gstats);
    force_known_normal(glabels, forced);

    // (2) discriminator step on the generator's labels (or soft targets)
    double dloss = 0.0;
    if (cfg.soft_labels) {
      auto soft = generator_soft_labels(gstats);
      force_known_normal(soft, forced);
      dloss = train_discriminator_step(model.discriminator, model.disc_opt, batch.matrix, soft.labels);
    } else {
      dloss = train_discriminator_step(model.discriminator, model.disc_opt, batch.matrix,
                                       glabels.labels);
    }

    // (3) discriminator pseudo-labels from the updated discriminator
    auto [dstats, dlabels] = discriminator_pseudo_labels(model.discriminator, batch.matrix, cfg.k_d);
    force_known_normal(dlabels, forced);

    // (4) negative-learning targets; (5) generator step
    const PseudoLabelSet& for_generator = cfg.self_labels ? glabels : dlabels;
    const auto targets =
        make_nl_targets(batch.matrix, for_generator, cfg.nl_mode, cfg.gaussian_sigma, model.rng);
    const auto gstep =
        train_generator_step(model.generator, model.gen_opt, batch.matrix, targets, cfg.norm);

    rows += b;
    recon += b * gstats.mean;
    disc += b * dloss;
    gen_pos += static_cast<double>(glabels.positives());
    disc_pos += static_cast<double>(dlabels.positives());
    if (gstep.skipped) {
      ++m.skipped_gen_steps;
    } else {
      gen += gstep.loss * static_cast<double>(gstep.rows_used);
      gen_rows += static_cast<double>(gstep.rows_used);
    }
  }
  if (rows > 0.0) {
    m.recon_loss = recon / rows;
    m.disc_loss = disc / rows;
    m.gen_positive_rate = gen_pos / rows;
    m.disc_positive_rate = disc_pos / rows;
  }
  m.gen_loss = gen_rows > 0.0 ? gen / gen_rows : 0.0;
  ++model.epoch;
  return m;
}

std::vector<data::Batch> epoch_batches(const GclModel& model,
                                       std::span<const data::FeatureRecord> records,
                                       std::size_t epoch) {
  const std::uint64_t base = derive_seed(model.config.seed, streams::cooperative_shuffle);
  return data::shuffle_batches(records, model.config.batch_size, derive_seed(base, epoch));
}

void train(GclModel& model, std::span<const data::FeatureRecord> records,
           const data::DatasetManifest& manifest, const EpochObserver& observer) {
  const auto& cfg = model.config;
  validate_supervision(cfg, manifest);
  const auto known_normal = known_normal_mask(records, manifest, cfg);

  if (!model.pretrained && model.epoch == 0 && cfg.mode != SupervisionMode::gcl_b) {
    const auto pretrain_set = generator_pretraining_set(records, manifest, cfg);
    for (const auto& m : pretrain_generator(model, pretrain_set)) {
      if (observer) observer(m, model);
    }
    for (const auto& m : pretrain_discriminator(model, records, known_normal)) {
      if (observer) observer(m, model);
    }
  }
  model.pretrained = true;

  while (model.epoch < cfg.epochs) {
    const auto batches = epoch_batches(model, records, model.epoch);
    const auto m = cooperative_epoch(model, batches, known_normal);
    if (observer) observer(m, model);
  }
}

std::vector<double> discriminator_scores(const nn::Network& disc,
                                         std::span<const data::FeatureRecord> records) {
  return map_in_chunks(records, [&](const nn::Matrix& x) {
    const auto out = nn::forward(disc, x);
    return std::vector<double>(out.values().begin(), out.values().end());
  });
}

std::vector<double> generator_errors(const nn::Network& gen,
                                     std::span<const data::FeatureRecord> records) {
  return map_in_chunks(records,
                       [&](const nn::Matrix& x) { return nn::row_distances(x, nn::forward(gen, x)); });
}

std::vector<eval::ScoreSeries> score_segments(const nn::Network& disc,
                                              std::span<const data::FeatureRecord> records,
                                              const data::DatasetManifest& manifest) {
  return eval::series_from_segment_scores(records, discriminator_scores(disc, records), manifest);
}

}  // namespace gcl::coop
