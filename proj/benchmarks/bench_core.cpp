#include <benchmark/benchmark.h>

#include <vector>

#include "mseol/data.hpp"
#include "mseol/labels.hpp"
#include "mseol/losses.hpp"
#include "mseol/network.hpp"
#include "mseol/rng.hpp"
#include "mseol/train.hpp"

namespace {

using namespace mseol;

std::vector<double> logits_for(int k) {
  Rng rng(5);
  std::vector<double> a(static_cast<std::size_t>(k));
  for (double& v : a) v = rng.normal();
  return a;
}

void BM_CrossEntropy(benchmark::State& state) {
  const auto a = logits_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ce_loss(a, 1));
}
BENCHMARK(BM_CrossEntropy)->Arg(3)->Arg(10)->Arg(100);

void BM_Focal(benchmark::State& state) {
  const auto a = logits_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(focal_loss(a, 1, 2.0));
}
BENCHMARK(BM_Focal)->Arg(3)->Arg(10)->Arg(100);

void BM_MseOutlying(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto a = logits_for(k);
  std::vector<std::size_t> counts(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) counts[static_cast<std::size_t>(i)] = static_cast<std::size_t>(1000 - i);
  const auto table = outlying_labels(counts, 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(mse_loss(a, table.target_for(1)));
}
BENCHMARK(BM_MseOutlying)->Arg(3)->Arg(10)->Arg(100);

void BM_OutlyingTable(benchmark::State& state) {
  Rng rng(9);
  std::vector<std::size_t> counts(static_cast<std::size_t>(state.range(0)));
  for (auto& c : counts) c = 1 + rng.below(100000);
  for (auto _ : state) benchmark::DoNotOptimize(outlying_labels(counts, 2.0));
}
BENCHMARK(BM_OutlyingTable)->Arg(10)->Arg(100)->Arg(1000);

void BM_ForwardBackward(benchmark::State& state) {
  const auto width = static_cast<std::size_t>(state.range(0));
  const auto model = init_model({2, width, 2, 3}, 1);
  const std::vector<double> x{0.3, -0.7};
  auto grads = model.zero_gradients();
  ForwardTrace trace;
  for (auto _ : state) {
    forward_into(model, x, trace);
    backward_accumulate(model, trace, ce_loss(trace.logits(), 2).grad, grads);
  }
  benchmark::DoNotOptimize(grads);
}
BENCHMARK(BM_ForwardBackward)->Arg(16)->Arg(64)->Arg(256);

void BM_TrainEpoch(benchmark::State& state) {
  const std::vector<std::size_t> counts{1000, 100, 20};
  const auto train = sample_gaussian_mixture({3, 2, circle_means(3, 2, 1.0), 0.6, 7}, counts);
  TrainConfig cfg;
  cfg.loss = static_cast<LossKind>(state.range(0));
  cfg.alpha = 4.0;
  cfg.epoch_max = 1;
  cfg.batch_size = 32;
  for (auto _ : state) benchmark::DoNotOptimize(train_model(train, train, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(train.size()));
}
BENCHMARK(BM_TrainEpoch)
    ->Arg(static_cast<int>(LossKind::CrossEntropy))
    ->Arg(static_cast<int>(LossKind::MseOutlying))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
