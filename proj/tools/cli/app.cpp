#include "cli/app.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "gcl/error.hpp"

namespace gcl::cli {

namespace {

void add_data_options(CLI::App* sub, DataOptions& d) {
  sub->add_option("--features", d.features, "Feature directory (gclf) or CSV file (csv)");
  sub->add_option("--manifest", d.manifest, "Manifest JSON; defaults to <features>/manifest.json for gclf");
  sub->add_option("--format", d.format, "Feature format: gclf|csv")->capture_default_str();
  sub->add_option("--feature-scale", d.feature_scale, "Multiply every feature value by this factor")
      ->capture_default_str();
}

void add_config_file_option(CLI::App* sub) {
  // Consumed before parsing (see splice_config_file); registered for --help.
  sub->add_option("--config", "TOML key = value file; keys mirror the long flags");
}

void add_training_options(CLI::App* sub, ConfigOverrides& c) {
  sub->add_option("--mode", c.mode, "Supervision: gcl_b|gcl_pt|gcl_occ|gcl_ws");
  sub->add_option("--ws-fraction", c.ws_fraction, "Share of videos whose labels gcl_ws may use");
  sub->add_option("--nl", c.nl, "Negative learning: ones|random_normal|gaussian|none");
  sub->add_option("--gaussian-sigma", c.gaussian_sigma, "Noise std for --nl gaussian");
  sub->add_option("--epochs", c.epochs, "Cooperative epochs");
  sub->add_option("--pretrain-epochs", c.pretrain_epochs, "Epochs of each pre-training phase");
  sub->add_option("--batch-size", c.batch_size, "Batch size");
  sub->add_option("--lr", c.lr, "RMSprop learning rate");
  sub->add_option("--momentum", c.momentum, "RMSprop momentum");
  sub->add_option("--kg", c.kg, "Generator threshold: mean + kg * std");
  sub->add_option("--kd", c.kd, "Discriminator threshold: mean + kd * std");
  sub->add_option("--dth", c.dth, "Temporal-difference cleaning threshold");
  sub->add_option("--seed", c.seed, "Seed for init, shuffling and noise");
  sub->add_flag("--soft-labels{true}", c.soft_labels, "Train D on soft generator labels");
  sub->add_flag("--self-labels{true}", c.self_labels, "Train G on its own labels (ablation)");
  sub->add_option("--norm", c.norm, "Reconstruction norm: euclidean|squared");
  sub->add_option("--gen-dims", c.gen_dims, "Generator widths, e.g. 32,8,3,8,32");
  sub->add_option("--disc-dims", c.disc_dims, "Discriminator widths, e.g. 32,128,32,1");
}

void add_synth_options(CLI::App* sub, SynthOptions& s) {
  auto& c = s.cfg;
  sub->add_option("--out", s.out, "Output directory")->required();
  sub->add_option("--split", s.split, "train|test")->capture_default_str();
  sub->add_option("--format", s.format, "gclf|csv")->capture_default_str();
  sub->add_flag("--require-anomalies", s.require_anomalies, "Fail if no anomalous segment is produced");
  sub->add_option("--seed", c.seed, "World and sampling seed")->capture_default_str();
  sub->add_option("--n-videos", c.n_videos)->capture_default_str();
  sub->add_option("--segments-per-video", c.segments_per_video)->capture_default_str();
  sub->add_option("--d", c.d, "Feature dimension")->capture_default_str();
  sub->add_option("--anomaly-video-fraction", c.anomaly_video_fraction)->capture_default_str();
  sub->add_option("--anomaly-segment-fraction", c.anomaly_segment_fraction)->capture_default_str();
  sub->add_option("--p", c.p, "Frames per segment")->capture_default_str();
  sub->add_option("--latent-rank", c.latent_rank)->capture_default_str();
  sub->add_option("--mixing-scale", c.mixing_scale)->capture_default_str();
  sub->add_option("--temporal-correlation", c.temporal_correlation)->capture_default_str();
  sub->add_option("--noise-std", c.noise_std)->capture_default_str();
  sub->add_option("--noise-spread", c.noise_spread)->capture_default_str();
  sub->add_option("--anomaly-shift", c.anomaly_shift)->capture_default_str();
  sub->add_option("--anomaly-jitter", c.anomaly_jitter)->capture_default_str();
  sub->add_option("--anomaly-on-manifold", c.anomaly_on_manifold)->capture_default_str();
  sub->add_option("--anomaly-types", c.anomaly_types)->capture_default_str();
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

std::string find_config_path(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  return path;
}

// Turns a config file into `--key=value` arguments for `sub`. Keys at the top
// level or in a [<subcommand>] section apply; keys that only another
// subcommand understands are skipped, so one file can drive train, eval and
// score. Anything else is an error.
std::vector<std::string> config_file_arguments(const std::string& path, const CLI::App& app,
                                               const CLI::App& sub) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config file " + path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorKind::config, path + ": " + e.what());
  }
  std::vector<std::string> out;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    std::string key = item.name;
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string where = path + ": key '" + (item.parents.empty() ? "" : item.parents.front() + ".") + item.name + "'";
    if (item.parents.size() > 1) throw Error(ErrorKind::config, where + " is nested too deeply");
    if (!item.parents.empty() && item.parents.front() != sub.get_name()) {
      if (app.get_subcommand_no_throw(item.parents.front()) == nullptr) {
        throw Error(ErrorKind::config, where + ": unknown section");
      }
      continue;
    }
    if (key == "config") throw Error(ErrorKind::config, where + ": config files cannot include others");
    if (sub.get_option_no_throw("--" + key) == nullptr) {
      const auto subs = app.get_subcommands([](const CLI::App*) { return true; });
      const bool elsewhere = std::any_of(subs.begin(), subs.end(), [&](const CLI::App* other) {
        return other->get_option_no_throw("--" + key) != nullptr;
      });
      if (!elsewhere) throw Error(ErrorKind::config, where + " is not a known option");
      continue;
    }
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) value += (i ? "," : "") + item.inputs[i];
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generative cooperative learning for unsupervised video anomaly detection"};
  app.set_version_flag("--version", "gcl 0.1.0");
  app.require_subcommand(1);
  // Config-file values are inserted before the user's own flags; the last
  // occurrence wins, so flags override the file.
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Pre-train (per mode) and run cooperative epochs");
  add_config_file_option(train_cmd);
  add_data_options(train_cmd, train.data);
  add_training_options(train_cmd, train.cfg);
  train_cmd->add_option("--out", train.out, "Run directory: log, checkpoints, model.gclc")->capture_default_str();
  train_cmd->add_option("--preset", train.preset, "Base hyper-parameters: reference|desk")->capture_default_str();
  train_cmd->add_option("--resume", train.resume, "Continue from a checkpoint (its config is kept; --epochs may extend it)");
  train_cmd->add_option("--checkpoint-every", train.checkpoint_every, "Cooperative epochs between checkpoints, 0 = final only")
      ->capture_default_str();
  train_cmd->add_flag("--quiet", train.quiet, "Only write the log file");

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score labelled features and report frame-level AUC");
  add_config_file_option(eval_cmd);
  add_data_options(eval_cmd, ev.data);
  eval_cmd->add_option("--test-features", ev.test_features, "Evaluate these features instead of --features");
  eval_cmd->add_option("--test-manifest", ev.test_manifest, "Manifest for --test-features");
  eval_cmd->add_option("--out", ev.out, "Run directory")->capture_default_str();
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Model checkpoint (default <out>/model.gclc)");
  eval_cmd->add_option("--scores", ev.scores, "Score CSV path (default <out>/eval_scores.csv)");
  eval_cmd->add_option("--report", ev.report, "Report JSON path (default <out>/eval_report.json)");
  eval_cmd->add_option("--pooling", ev.pooling, "pooled|per_video_mean")->capture_default_str();
  eval_cmd->add_flag("--per-video", ev.per_video, "Include per-video AUCs in the printed report");

  ScoreOptions sc;
  auto* score_cmd = app.add_subcommand("score", "Write per-frame anomaly scores (no labels needed)");
  add_config_file_option(score_cmd);
  add_data_options(score_cmd, sc.data);
  score_cmd->add_option("--test-features", sc.test_features, "Score these features instead of --features");
  score_cmd->add_option("--test-manifest", sc.test_manifest, "Manifest for --test-features");
  score_cmd->add_option("--out", sc.out, "Run directory")->capture_default_str();
  score_cmd->add_option("--checkpoint", sc.checkpoint, "Model checkpoint (default <out>/model.gclc)");
  score_cmd->add_option("--scores", sc.scores, "Score CSV path (default <out>/scores.csv)");
  score_cmd->add_flag("--generator", sc.generator, "Score with reconstruction error instead of the discriminator");

  SynthOptions sy;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic feature dataset with ground truth");
  add_config_file_option(synth_cmd);
  add_synth_options(synth_cmd, sy);

  InspectOptions in;
  auto* inspect_cmd = app.add_subcommand("inspect", "Summarize a manifest and/or a checkpoint");
  add_config_file_option(inspect_cmd);
  add_data_options(inspect_cmd, in.data);
  inspect_cmd->add_option("--checkpoint", in.checkpoint, "Checkpoint to describe");

  try {
    if (!args.empty()) {
      if (auto* sub = app.get_subcommand_no_throw(args.front())) {
        const auto path = find_config_path(args);
        if (!path.empty()) {
          const auto extra = config_file_arguments(path, app, *sub);
          args.insert(args.begin() + 1, extra.begin(), extra.end());
        }
      }
    }
    std::reverse(args.begin(), args.end());  // CLI11 consumes the vector from the back
    app.parse(args);

    if (*train_cmd) return cmd_train(train, out);
    if (*eval_cmd) return cmd_eval(ev, out);
    if (*score_cmd) return cmd_score(sc, out);
    if (*synth_cmd) return cmd_synth(sy, out);
    if (*inspect_cmd) return cmd_inspect(in, out);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error[usage]: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error[" << to_string(e.kind()) << "]: " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error[io]: " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error[internal]: " << one_line(e.what()) << '\n';
    return 1;
  }
}

}  // namespace gcl::cli
