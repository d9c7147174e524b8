#include "cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gcl/coop/checkpoint.hpp"
#include "gcl/error.hpp"
#include "gcl/eval/auc.hpp"
#include "gcl/eval/scores.hpp"

namespace fs = std::filesystem;

namespace gcl::cli {

namespace {

std::vector<std::size_t> parse_dims(const std::string& text, const char* flag) {
  std::vector<std::size_t> dims;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    auto cell = rest.substr(0, comma);
    while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
    while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
    std::size_t v = 0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size() || v == 0) {
      throw Error(ErrorKind::config, std::string(flag) + ": expected comma-separated positive widths, got '" + text + "'");
    }
    dims.push_back(v);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  if (dims.empty()) throw Error(ErrorKind::config, std::string(flag) + " is empty");
  return dims;
}

std::string join_dims(const std::vector<std::size_t>& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? "-" : "") + std::to_string(dims[i]);
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

DataOptions with_test_paths(DataOptions d, const std::string& features, const std::string& manifest) {
  if (!features.empty()) {
    d.features = features;
    d.manifest = manifest;
  } else if (!manifest.empty()) {
    throw Error(ErrorKind::config, "--test-manifest needs --test-features");
  }
  return d;
}

// Frame-level AUC is undefined unless the ground truth holds both classes.
bool ground_truth_has_both_classes(const data::DatasetManifest& m) {
  if (!m.has_ground_truth()) return false;
  bool pos = false, neg = false;
  for (const auto& v : m.videos) {
    for (auto l : eval::frame_labels(m, v.id)) (l ? pos : neg) = true;
    if (pos && neg) return true;
  }
  return false;
}

coop::GclModel load_model_for(const std::string& checkpoint, const std::string& out,
                              std::size_t d) {
  const fs::path path = checkpoint.empty() ? fs::path(out) / "model.gclc" : fs::path(checkpoint);
  auto model = coop::load_checkpoint(path);
  if (model.d != d) {
    throw Error(ErrorKind::dimension, path.string() + " was trained on d=" + std::to_string(model.d) +
                                          " but the features have d=" + std::to_string(d));
  }
  return model;
}

}  // namespace

std::optional<data::DatasetManifest> load_manifest_for(const DataOptions& opt) {
  if (opt.format == "gclf") {
    if (opt.features.empty() && opt.manifest.empty()) {
      throw Error(ErrorKind::config, "--features is required");
    }
    const fs::path path =
        opt.manifest.empty() ? fs::path(opt.features) / "manifest.json" : fs::path(opt.manifest);
    return data::load_manifest(path);
  }
  if (opt.format != "csv") {
    throw Error(ErrorKind::config, "unknown --format '" + opt.format + "' (gclf|csv)");
  }
  if (opt.manifest.empty()) return std::nullopt;
  return data::load_manifest(opt.manifest);
}

Dataset load_dataset(const DataOptions& opt) {
  if (opt.features.empty()) throw Error(ErrorKind::config, "--features is required");
  if (!(opt.feature_scale > 0.0) || !std::isfinite(opt.feature_scale)) {
    throw Error(ErrorKind::config, "--feature-scale must be a positive finite number");
  }
  Dataset ds;
  const auto manifest = load_manifest_for(opt);
  if (opt.format == "gclf") {
    ds.manifest = *manifest;
    ds.records = data::load_features(opt.features, ds.manifest);
  } else {
    ds.records = data::load_features_csv(opt.features, manifest ? &*manifest : nullptr);
    ds.manifest = manifest ? *manifest : data::manifest_for_records(ds.records, 16);
  }
  if (ds.records.empty()) throw Error(ErrorKind::data, "no feature records in " + opt.features);
  if (opt.feature_scale != 1.0) data::scale_features(ds.records, opt.feature_scale);
  return ds;
}

coop::GclConfig resolve_config(const std::string& preset, const ConfigOverrides& o, std::size_t d) {
  coop::GclConfig c;
  if (preset == "desk") {
    c = coop::desk_preset(d, 3);
  } else if (preset != "reference") {
    throw Error(ErrorKind::config, "unknown --preset '" + preset + "' (reference|desk)");
  }
  if (o.mode) c.mode = coop::supervision_mode_from_string(*o.mode);
  if (o.ws_fraction) c.ws_fraction = *o.ws_fraction;
  if (o.nl) c.nl_mode = coop::nl_mode_from_string(*o.nl);
  if (o.gaussian_sigma) c.gaussian_sigma = *o.gaussian_sigma;
  if (o.epochs) c.epochs = *o.epochs;
  if (o.pretrain_epochs) c.pretrain_epochs = *o.pretrain_epochs;
  if (o.batch_size) c.batch_size = *o.batch_size;
  if (o.lr) c.lr = *o.lr;
  if (o.momentum) c.momentum = *o.momentum;
  if (o.kg) c.k_g = *o.kg;
  if (o.kd) c.k_d = *o.kd;
  if (o.dth) c.d_th = *o.dth;
  if (o.seed) c.seed = *o.seed;
  if (o.soft_labels) c.soft_labels = *o.soft_labels;
  if (o.self_labels) c.self_labels = *o.self_labels;
  if (o.norm) {
    if (*o.norm == "euclidean") {
      c.norm = nn::NormKind::euclidean;
    } else if (*o.norm == "squared") {
      c.norm = nn::NormKind::squared;
    } else {
      throw Error(ErrorKind::config, "unknown --norm '" + *o.norm + "' (euclidean|squared)");
    }
  }
  if (o.gen_dims) c.gen_dims = parse_dims(*o.gen_dims, "--gen-dims");
  if (o.disc_dims) c.disc_dims = parse_dims(*o.disc_dims, "--disc-dims");
  return c;
}

std::string epoch_log_header() {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %5s %13s %13s %13s %7s %7s %7s %8s", "phase", "epoch",
                "L_r", "L_D", "L_G", "g_pos", "d_pos", "skipped", "auc");
  return buf;
}

std::string format_epoch_line(const coop::EpochMetrics& m) {
  char auc[16] = "-";
  if (m.auc) std::snprintf(auc, sizeof auc, "%.6f", *m.auc);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %5zu %13.6e %13.6e %13.6e %7.4f %7.4f %7zu %8s",
                m.phase.c_str(), m.epoch, m.recon_loss, m.disc_loss, m.gen_loss,
                m.gen_positive_rate, m.disc_positive_rate, m.skipped_gen_steps, auc);
  return buf;
}

int cmd_train(const TrainOptions& opt, std::ostream& out) {
  // Everything that can be checked from the manifest alone is checked before
  // the features are read.
  std::optional<Dataset> ds;
  data::DatasetManifest manifest;
  if (auto m = load_manifest_for(opt.data)) {
    manifest = std::move(*m);
  } else {
    ds = load_dataset(opt.data);
    manifest = ds->manifest;
  }

  coop::GclModel model;
  if (!opt.resume.empty()) {
    model = coop::load_checkpoint(opt.resume);
    if (model.d != manifest.d) {
      throw Error(ErrorKind::dimension, opt.resume + " was trained on d=" + std::to_string(model.d) +
                                            " but the features have d=" + std::to_string(manifest.d));
    }
    if (opt.cfg.epochs) model.config.epochs = *opt.cfg.epochs;
    model.config.validate(model.d);
  } else {
    const auto cfg = resolve_config(opt.preset, opt.cfg, manifest.d);
    cfg.validate(manifest.d);
    model = coop::init_model(cfg, manifest.d);
  }
  coop::validate_supervision(model.config, manifest);
  if (!ds) ds = load_dataset(opt.data);
  const auto& records = ds->records;

  const fs::path dir = opt.out;
  fs::create_directories(dir / "checkpoints");
  nlohmann::ordered_json run;
  run["features"] = opt.data.features;
  run["manifest"] = opt.data.manifest;
  run["format"] = opt.data.format;
  run["feature_scale"] = opt.data.feature_scale;
  run["preset"] = opt.resume.empty() ? opt.preset : "resume";
  run["config"] = nlohmann::ordered_json::parse(coop::config_to_json(model.config));
  write_text(dir / "run.json", run.dump(2) + "\n");

  std::ofstream log(dir / "train.log", opt.resume.empty() ? std::ios::trunc : std::ios::app);
  if (!log) throw Error(ErrorKind::io, "cannot write " + (dir / "train.log").string());
  const auto emit = [&](const std::string& line) {
    log << line << '\n' << std::flush;
    if (!opt.quiet) out << line << '\n' << std::flush;
  };
  emit(epoch_log_header());

  const bool with_auc = ground_truth_has_both_classes(manifest);
  coop::train(model, records, manifest, [&](const coop::EpochMetrics& em, const coop::GclModel& mm) {
    auto m = em;
    if (with_auc) {
      const auto scores = m.phase == "pretrain_g" ? coop::generator_errors(mm.generator, records)
                                                  : coop::discriminator_scores(mm.discriminator, records);
      m.auc = eval::evaluate_series(eval::series_from_segment_scores(records, scores, manifest), manifest).auc;
    }
    emit(format_epoch_line(m));
    if (m.phase == "coop" && opt.checkpoint_every > 0 && mm.epoch % opt.checkpoint_every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "epoch_%03zu.gclc", mm.epoch);
      coop::save_checkpoint(mm, dir / "checkpoints" / name);
    }
  });

  coop::save_checkpoint(model, dir / "model.gclc");
  const auto series = coop::score_segments(model.discriminator, records, manifest);
  eval::export_scores(series, dir / "train_scores.csv", &manifest);
  if (!opt.quiet) out << "model written to " << (dir / "model.gclc").string() << '\n';
  return 0;
}

int cmd_eval(const EvalOptions& opt, std::ostream& out) {
  const auto data_opt = with_test_paths(opt.data, opt.test_features, opt.test_manifest);
  eval::AucPooling pooling;
  if (opt.pooling == "pooled") {
    pooling = eval::AucPooling::pooled;
  } else if (opt.pooling == "per_video_mean") {
    pooling = eval::AucPooling::per_video_mean;
  } else {
    throw Error(ErrorKind::config, "unknown --pooling '" + opt.pooling + "' (pooled|per_video_mean)");
  }
  const auto manifest = load_manifest_for(data_opt);
  if (!manifest || !manifest->has_ground_truth()) {
    throw Error(ErrorKind::data, "eval needs ground-truth frame ranges for every video in the manifest; "
                                 "use `gcl score` for unlabeled data");
  }
  const auto ds = load_dataset(data_opt);
  const auto model = load_model_for(opt.checkpoint, opt.out, ds.manifest.d);

  const auto series = coop::score_segments(model.discriminator, ds.records, ds.manifest);
  const auto report = eval::evaluate_series(series, ds.manifest, pooling);
  const fs::path dir = opt.out;
  const fs::path scores_path = opt.scores.empty() ? dir / "eval_scores.csv" : fs::path(opt.scores);
  if (scores_path.has_parent_path()) fs::create_directories(scores_path.parent_path());
  eval::export_scores(series, scores_path, &ds.manifest);
  write_text(opt.report.empty() ? dir / "eval_report.json" : fs::path(opt.report),
             eval::auc_report_to_json(report, true));
  out << eval::auc_report_to_json(report, opt.per_video);
  return 0;
}

int cmd_score(const ScoreOptions& opt, std::ostream& out) {
  const auto ds = load_dataset(with_test_paths(opt.data, opt.test_features, opt.test_manifest));
  const auto model = load_model_for(opt.checkpoint, opt.out, ds.manifest.d);
  const auto scores = opt.generator ? coop::generator_errors(model.generator, ds.records)
                                    : coop::discriminator_scores(model.discriminator, ds.records);
  const auto series = eval::series_from_segment_scores(ds.records, scores, ds.manifest);
  const fs::path path = opt.scores.empty() ? fs::path(opt.out) / "scores.csv" : fs::path(opt.scores);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  eval::export_scores(series, path, &ds.manifest);
  out << "scored " << ds.records.size() << " segments of " << ds.manifest.videos.size()
      << " videos into " << path.string() << '\n';
  return 0;
}

int cmd_synth(const SynthOptions& opt, std::ostream& out) {
  if (opt.out.empty()) throw Error(ErrorKind::config, "--out is required");
  data::SynthSplit split;
  if (opt.split == "train") {
    split = data::SynthSplit::train;
  } else if (opt.split == "test") {
    split = data::SynthSplit::test;
  } else {
    throw Error(ErrorKind::config, "unknown --split '" + opt.split + "' (train|test)");
  }
  if (opt.format != "gclf" && opt.format != "csv") {
    throw Error(ErrorKind::config, "unknown --format '" + opt.format + "' (gclf|csv)");
  }
  opt.cfg.validate();
  const auto ds = data::generate_synthetic(opt.cfg, split, opt.require_anomalies);

  const fs::path dir = opt.out;
  fs::create_directories(dir);
  data::save_manifest(ds.manifest, dir / "manifest.json");
  if (opt.format == "gclf") {
    data::write_features(dir, ds.records, ds.manifest);
  } else {
    data::write_features_csv(dir / "features.csv", ds.records);
  }
  const auto anomalous_videos = std::count_if(ds.manifest.videos.begin(), ds.manifest.videos.end(),
                                              [](const auto& v) { return v.label == 1; });
  const auto anomalous_segments = std::count(ds.segment_labels.begin(), ds.segment_labels.end(), 1);
  out << "wrote " << ds.manifest.videos.size() << " videos (" << anomalous_videos << " anomalous), "
      << ds.records.size() << " segments (" << anomalous_segments << " anomalous) to "
      << dir.string() << '\n';
  return 0;
}

int cmd_inspect(const InspectOptions& opt, std::ostream& out) {
  if (opt.data.features.empty() && opt.data.manifest.empty() && opt.checkpoint.empty()) {
    throw Error(ErrorKind::config, "inspect needs --features, --manifest or --checkpoint");
  }
  if (!opt.data.features.empty() || !opt.data.manifest.empty()) {
    data::DatasetManifest m;
    if (auto loaded = load_manifest_for(opt.data)) {
      m = std::move(*loaded);
    } else {
      m = load_dataset(opt.data).manifest;
    }
    std::size_t labeled = 0, anomalous = 0, gt_frames = 0, frames = 0;
    for (const auto& v : m.videos) {
      frames += v.frame_count(m.p);
      if (v.label) {
        ++labeled;
        anomalous += *v.label == 1;
      }
      if (v.gt_ranges) {
        const auto l = eval::frame_labels(m, v.id);
        gt_frames += static_cast<std::size_t>(std::count(l.begin(), l.end(), 1));
      }
    }
    out << "videos: " << m.videos.size() << '\n'
        << "segments: " << m.total_segments() << '\n'
        << "d: " << m.d << '\n'
        << "p: " << m.p << '\n'
        << "frames: " << frames << '\n'
        << "video labels: " << labeled << " of " << m.videos.size() << " (" << anomalous
        << " anomalous)\n";
    if (m.has_ground_truth()) {
      char pct[32];
      std::snprintf(pct, sizeof pct, "%.2f%%", frames ? 100.0 * static_cast<double>(gt_frames) / static_cast<double>(frames) : 0.0);
      out << "ground truth: " << gt_frames << " anomalous frames (" << pct << ")\n";
    } else {
      out << "ground truth: none\n";
    }
  }
  if (!opt.checkpoint.empty()) {
    const auto model = coop::load_checkpoint(opt.checkpoint);
    out << "checkpoint: " << opt.checkpoint << '\n'
        << "d: " << model.d << '\n'
        << "generator: " << join_dims(model.generator.dims()) << " ("
        << model.generator.parameter_count() << " parameters)\n"
        << "discriminator: " << join_dims(model.discriminator.dims()) << " ("
        << model.discriminator.parameter_count() << " parameters)\n"
        << "pretrained: " << (model.pretrained ? "yes" : "no") << '\n'
        << "cooperative epochs: " << model.epoch << " of " << model.config.epochs << '\n'
        << "config: " << coop::config_to_json(model.config) << '\n';
  }
  return 0;
}

}  // namespace gcl::cli
