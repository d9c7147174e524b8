// Statistical properties of full training runs on the default synthetic
// world, five seeds each. Slower than the other unit tests (about a minute).

#include <doctest.h>

#include <cmath>

#include "gcl/coop/trainer.hpp"
#include "gcl/data/synthetic.hpp"
#include "gcl/eval/auc.hpp"

using namespace gcl;

namespace {

struct World {
  data::SyntheticDataset train;
  data::SyntheticDataset test;
  coop::GclConfig base;
};

World world(int seed) {
  data::SynthConfig sc;
  sc.seed = static_cast<std::uint64_t>(seed);
  World w{data::generate_synthetic(sc, data::SynthSplit::train, true),
          data::generate_synthetic(sc, data::SynthSplit::test, true),
          coop::desk_preset(sc.d, sc.latent_rank)};
  w.base.seed = static_cast<std::uint64_t>(seed);
  return w;
}

}  // namespace

TEST_CASE("negative learning separates anomalies in reconstruction error after GCL_B") {
  for (int seed = 0; seed < 5; ++seed) {
    const auto w = world(seed);
    auto m = coop::init_model(w.base, w.train.manifest.d);
    coop::train(m, w.train.records, w.train.manifest);
    const auto err = coop::generator_errors(m.generator, w.train.records);
    double anom = 0.0, normal = 0.0;
    std::size_t na = 0, nn = 0;
    for (std::size_t i = 0; i < err.size(); ++i) {
      if (w.train.segment_labels[i]) {
        anom += err[i];
        ++na;
      } else {
        normal += err[i];
        ++nn;
      }
    }
    CAPTURE(seed);
    CHECK(anom / static_cast<double>(na) > normal / static_cast<double>(nn));
  }
}

TEST_CASE("soft labels make the discriminator track the generator's error ranking") {
  for (auto mode : {coop::SupervisionMode::gcl_b, coop::SupervisionMode::gcl_pt}) {
    for (int seed = 0; seed < 5; ++seed) {
      const auto w = world(seed);
      auto cfg = w.base;
      cfg.mode = mode;
      cfg.soft_labels = true;
      auto m = coop::init_model(cfg, w.train.manifest.d);
      coop::train(m, w.train.records, w.train.manifest);
      const double d_auc = eval::rank_auc(coop::discriminator_scores(m.discriminator, w.test.records),
                                          w.test.segment_labels);
      const double g_auc = eval::rank_auc(coop::generator_errors(m.generator, w.test.records),
                                          w.test.segment_labels);
      CAPTURE(coop::to_string(mode));
      CAPTURE(seed);
      CHECK(std::abs(d_auc - g_auc) <= 0.03);
    }
  }
}
