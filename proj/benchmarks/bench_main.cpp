#include <benchmark/benchmark.h>

#include <random>

#include "gcl/coop/trainer.hpp"
#include "gcl/data/synthetic.hpp"
#include "gcl/eval/auc.hpp"
#include "gcl/nn/loss.hpp"
#include "gcl/nn/matrix.hpp"
#include "gcl/nn/network.hpp"

using namespace gcl;

namespace {

nn::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  nn::Matrix m(rows, cols);
  for (auto& v : m.values()) v = n(rng);
  return m;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(nn::matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(256)->Arg(512);

// Forward + backward of a generator on one batch, at the desk widths (d=32)
// and the reference widths (d=2048).
void BM_GeneratorStep(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto batch = static_cast<std::size_t>(state.range(1));
  coop::GclConfig cfg = d == 32 ? coop::desk_preset(d, 3) : coop::GclConfig{};
  const auto model = coop::init_model(cfg, d);
  const auto x = random_matrix(batch, d, 3);
  for (auto _ : state) {
    nn::Tape tape;
    const auto y = nn::forward(model.generator, x, &tape);
    const auto loss = nn::reconstruction_loss(y, x);
    benchmark::DoNotOptimize(nn::backward(model.generator, tape, loss.grad));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_GeneratorStep)->Args({32, 256})->Args({2048, 256})->Unit(benchmark::kMillisecond);

// One cooperative epoch over the default synthetic training split.
void BM_CooperativeEpoch(benchmark::State& state) {
  const auto ds = data::generate_synthetic(data::SynthConfig{});
  auto model = coop::init_model(coop::desk_preset(32, 3), 32);
  const auto batches = coop::epoch_batches(model, ds.records, 0);
  for (auto _ : state) benchmark::DoNotOptimize(coop::cooperative_epoch(model, batches));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.records.size()));
}
BENCHMARK(BM_CooperativeEpoch)->Unit(benchmark::kMillisecond);

void BM_RankAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> scores(n);
  std::vector<std::uint8_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = std::round(u(rng) * 1000.0) / 1000.0;
    labels[i] = u(rng) < 0.1;
  }
  for (auto _ : state) benchmark::DoNotOptimize(eval::rank_auc(scores, labels));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_RankAuc)->Arg(1 << 12)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
