#include "gcl/coop/config.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "gcl/error.hpp"

namespace gcl::coop {

using nlohmann::json;

const char* to_string(SupervisionMode m) {
  switch (m) {
    case SupervisionMode::gcl_b: return "gcl_b";
    case SupervisionMode::gcl_pt: return "gcl_pt";
    case SupervisionMode::gcl_occ: return "gcl_occ";
    case SupervisionMode::gcl_ws: return "gcl_ws";
  }
  return "gcl_b";
}

const char* to_string(NlMode m) {
  switch (m) {
    case NlMode::ones: return "ones";
    case NlMode::random_normal: return "random_normal";
    case NlMode::gaussian: return "gaussian";
    case NlMode::none: return "none";
  }
  return "ones";
}

SupervisionMode supervision_mode_from_string(const std::string& s) {
  if (s == "gcl_b") return SupervisionMode::gcl_b;
  if (s == "gcl_pt") return SupervisionMode::gcl_pt;
  if (s == "gcl_occ") return SupervisionMode::gcl_occ;
  if (s == "gcl_ws") return SupervisionMode::gcl_ws;
  throw Error(ErrorKind::config, "unknown mode '" + s + "' (gcl_b|gcl_pt|gcl_occ|gcl_ws)");
}

NlMode nl_mode_from_string(const std::string& s) {
  if (s == "ones") return NlMode::ones;
  if (s == "random_normal") return NlMode::random_normal;
  if (s == "gaussian") return NlMode::gaussian;
  if (s == "none") return NlMode::none;
  throw Error(ErrorKind::config, "unknown nl mode '" + s + "' (ones|random_normal|gaussian|none)");
}

std::vector<std::size_t> default_generator_dims(std::size_t d) {
  const auto scaled = [d](std::size_t width) {
    const double w = static_cast<double>(width) * static_cast<double>(d) / 2048.0;
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(w)));
  };
  return {d, scaled(1024), scaled(512), scaled(256), scaled(512), scaled(1024), d};
}

std::vector<std::size_t> default_discriminator_dims(std::size_t d) { return {d, 512, 32, 1}; }

GclConfig desk_preset(std::size_t d, std::size_t latent_rank) {
  GclConfig c;
  const std::size_t hidden = std::max<std::size_t>(8, 2 * latent_rank);
  c.gen_dims = {d, hidden, latent_rank, hidden, d};
  c.disc_dims = {d, 128, 32, 1};
  c.lr = 1e-3;
  c.batch_size = 256;
  return c;
}

std::vector<std::size_t> GclConfig::resolved_gen_dims(std::size_t d) const {
  return gen_dims.empty() ? default_generator_dims(d) : gen_dims;
}

std::vector<std::size_t> GclConfig::resolved_disc_dims(std::size_t d) const {
  return disc_dims.empty() ? default_discriminator_dims(d) : disc_dims;
}

void GclConfig::validate(std::size_t d) const {
  std::vector<std::string> problems;
  const auto g = resolved_gen_dims(d);
  const auto dd = resolved_disc_dims(d);
  if (g.size() < 2 || g.front() != d || g.back() != d) {
    problems.push_back("generator dims must start and end with d=" + std::to_string(d));
  }
  if (dd.size() < 2 || dd.front() != d || dd.back() != 1) {
    problems.push_back("discriminator dims must start with d=" + std::to_string(d) + " and end with 1");
  }
  if (std::find(g.begin(), g.end(), std::size_t{0}) != g.end() ||
      std::find(dd.begin(), dd.end(), std::size_t{0}) != dd.end()) {
    problems.push_back("layer widths must be positive");
  }
  if (!(lr >= 0.0) || !std::isfinite(lr)) problems.push_back("lr must be finite and >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) problems.push_back("momentum must lie in [0,1)");
  if (batch_size < 2) problems.push_back("batch_size must be >= 2");
  if (!(k_g >= 0.0)) problems.push_back("kg must be >= 0");
  if (!(k_d >= 0.0)) problems.push_back("kd must be >= 0");
  if (!(gaussian_sigma >= 0.0)) problems.push_back("gaussian sigma must be >= 0");
  if (!(ws_fraction >= 0.0 && ws_fraction <= 1.0)) problems.push_back("ws fraction must lie in [0,1]");
  if (!(d_th > 0.0)) problems.push_back("dth must be > 0");
  if (problems.empty()) return;
  std::string msg = "invalid configuration: ";
  for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
  throw Error(ErrorKind::config, msg);
}

std::string config_to_json(const GclConfig& c) {
  json j{{"gen_dims", c.gen_dims},
         {"disc_dims", c.disc_dims},
         {"lr", c.lr},
         {"momentum", c.momentum},
         {"epochs", c.epochs},
         {"pretrain_epochs", c.pretrain_epochs},
         {"batch_size", c.batch_size},
         {"k_g", c.k_g},
         {"k_d", c.k_d},
         {"nl_mode", to_string(c.nl_mode)},
         {"gaussian_sigma", c.gaussian_sigma},
         {"mode", to_string(c.mode)},
         {"ws_fraction", c.ws_fraction},
         {"d_th", c.d_th},
         {"seed", c.seed},
         {"soft_labels", c.soft_labels},
         {"self_labels", c.self_labels},
         {"norm", c.norm == nn::NormKind::squared ? "squared" : "euclidean"}};
  return j.dump();
}

GclConfig config_from_json(const std::string& text) {
  GclConfig c;
  try {
    const json j = json::parse(text);
    c.gen_dims = j.at("gen_dims").get<std::vector<std::size_t>>();
    c.disc_dims = j.at("disc_dims").get<std::vector<std::size_t>>();
    c.lr = j.at("lr").get<double>();
    c.momentum = j.at("momentum").get<double>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.pretrain_epochs = j.at("pretrain_epochs").get<std::size_t>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.k_g = j.at("k_g").get<double>();
    c.k_d = j.at("k_d").get<double>();
    c.nl_mode = nl_mode_from_string(j.at("nl_mode").get<std::string>());
    c.gaussian_sigma = j.at("gaussian_sigma").get<double>();
    c.mode = supervision_mode_from_string(j.at("mode").get<std::string>());
    c.ws_fraction = j.at("ws_fraction").get<double>();
    c.d_th = j.at("d_th").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.soft_labels = j.at("soft_labels").get<bool>();
    c.self_labels = j.at("self_labels").get<bool>();
    c.norm = j.at("norm").get<std::string>() == "squared" ? nn::NormKind::squared
                                                          : nn::NormKind::euclidean;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, std::string("config: ") + e.what());
  }
  return c;
}

}  // namespace gcl::coop
