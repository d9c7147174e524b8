#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "gcl/coop/config.hpp"
#include "gcl/coop/trainer.hpp"
#include "gcl/data/features.hpp"
#include "gcl/data/manifest.hpp"
#include "gcl/data/synthetic.hpp"

namespace gcl::cli {

// Where a dataset lives. For gclf, `features` is a directory and the manifest
// defaults to <features>/manifest.json. For csv, `features` is one file and
// the manifest is optional.
struct DataOptions {
  std::string features;
  std::string manifest;
  std::string format = "gclf";
  double feature_scale = 1.0;
};

struct Dataset {
  std::vector<data::FeatureRecord> records;
  data::DatasetManifest manifest;
};

std::optional<data::DatasetManifest> load_manifest_for(const DataOptions& opt);
Dataset load_dataset(const DataOptions& opt);

// Unset fields keep the preset's value.
struct ConfigOverrides {
  std::optional<std::string> mode;
  std::optional<double> ws_fraction;
  std::optional<std::string> nl;
  std::optional<double> gaussian_sigma;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> pretrain_epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> lr;
  std::optional<double> momentum;
  std::optional<double> kg;
  std::optional<double> kd;
  std::optional<double> dth;
  std::optional<std::uint64_t> seed;
  std::optional<bool> soft_labels;
  std::optional<bool> self_labels;
  std::optional<std::string> norm;
  std::optional<std::string> gen_dims;
  std::optional<std::string> disc_dims;
};

/// `preset` is "reference" (the published hyper-parameters) or "desk".
coop::GclConfig resolve_config(const std::string& preset, const ConfigOverrides& o, std::size_t d);

struct TrainOptions {
  DataOptions data;
  std::string out = "gcl_run";
  std::string preset = "reference";
  ConfigOverrides cfg;
  std::string resume;
  std::size_t checkpoint_every = 1;
  bool quiet = false;
};

// `test_features` / `test_manifest` replace the training paths when set, so a
// single config file can describe both the training and the test split.
struct EvalOptions {
  DataOptions data;
  std::string test_features;
  std::string test_manifest;
  std::string out = "gcl_run";
  std::string checkpoint;  // default <out>/model.gclc
  std::string scores;      // default <out>/eval_scores.csv
  std::string report;      // default <out>/eval_report.json
  std::string pooling = "pooled";
  bool per_video = false;
};

struct ScoreOptions {
  DataOptions data;
  std::string test_features;
  std::string test_manifest;
  std::string out = "gcl_run";
  std::string checkpoint;
  std::string scores;  // default <out>/scores.csv
  bool generator = false;
};

struct SynthOptions {
  data::SynthConfig cfg;
  std::string out;
  std::string split = "train";
  std::string format = "gclf";
  bool require_anomalies = false;
};

struct InspectOptions {
  DataOptions data;
  std::string checkpoint;
};

int cmd_train(const TrainOptions& opt, std::ostream& out);
int cmd_eval(const EvalOptions& opt, std::ostream& out);
int cmd_score(const ScoreOptions& opt, std::ostream& out);
int cmd_synth(const SynthOptions& opt, std::ostream& out);
int cmd_inspect(const InspectOptions& opt, std::ostream& out);

/// One fixed-width training log line; `auc` prints as "-" when absent.
std::string format_epoch_line(const coop::EpochMetrics& m);
std::string epoch_log_header();

}  // namespace gcl::cli
