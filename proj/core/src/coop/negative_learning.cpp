#include "gcl/coop/negative_learning.hpp"

#include <algorithm>
#include <random>

#include "gcl/error.hpp"

namespace gcl::coop {

std::size_t NlTargetBatch::included() const {
  return static_cast<std::size_t>(std::count(include.begin(), include.end(), std::uint8_t{1}));
}

NlTargetBatch make_nl_targets(const nn::Matrix& batch, const PseudoLabelSet& labels, NlMode mode,
                              double gaussian_sigma, Rng& rng) {
  if (labels.soft) throw Error(ErrorKind::config, "negative learning needs hard labels");
  if (labels.labels.size() != batch.rows()) {
    throw Error(ErrorKind::dimension, "make_nl_targets: " + std::to_string(labels.labels.size()) +
                                          " labels for " + std::to_string(batch.rows()) + " rows");
  }
  NlTargetBatch out{batch, std::vector<std::uint8_t>(batch.rows(), 1), false};

  std::vector<std::size_t> normal_rows;
  for (std::size_t q = 0; q < batch.rows(); ++q) {
    if (labels.labels[q] == 0.0) normal_rows.push_back(q);
  }
  if (normal_rows.size() == batch.rows()) return out;

  NlMode effective = mode;
  if (mode == NlMode::random_normal && normal_rows.empty()) {
    effective = NlMode::ones;
    out.fell_back_to_ones = true;
  }

  std::normal_distribution<double> noise(0.0, gaussian_sigma);
  std::uniform_int_distribution<std::size_t> pick(0, normal_rows.empty() ? 0 : normal_rows.size() - 1);
  for (std::size_t q = 0; q < batch.rows(); ++q) {
    if (labels.labels[q] == 0.0) continue;
    auto target = out.targets.row(q);
    switch (effective) {
      case NlMode::ones:
        std::fill(target.begin(), target.end(), 1.0);
        break;
      case NlMode::random_normal: {
        const auto src = batch.row(normal_rows[pick(rng)]);
        std::copy(src.begin(), src.end(), target.begin());
        break;
      }
      case NlMode::gaussian:
        if (gaussian_sigma > 0.0) {
          for (double& v : target) v += noise(rng);
        }
        break;
      case NlMode::none:
        out.include[q] = 0;
        break;
    }
  }
  return out;
}

}  // namespace gcl::coop
