#include <benchmark/benchmark.h>

#include <numeric>
#include <random>
#include <vector>

#include "fnt/fnt.hpp"

namespace {

using namespace fnt;

constexpr std::size_t kVocab = 5000;

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

void BM_SgnsStep(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  DenseMatrix out(kVocab, dim);
  const auto init = random_values(kVocab * dim, 1);
  std::copy(init.begin(), init.end(), out.data().begin());
  const OutputSlice slice{out.data().data(), kVocab, dim, 0, dim};
  const auto hidden = random_values(dim, 2);
  std::vector<double> update(dim);
  std::vector<TokenId> negatives(10);
  std::mt19937_64 rng(3);
  for (auto _ : state) {
    for (auto& n : negatives) n = static_cast<TokenId>(rng() % kVocab);
    benchmark::DoNotOptimize(sgns_step(hidden, update, static_cast<TokenId>(rng() % kVocab), negatives, slice, 1e-6));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SgnsStep)->Arg(50)->Arg(200);

void BM_TrainWindow(benchmark::State& state) {
  const auto kind = static_cast<ModelKind>(state.range(0));
  constexpr std::size_t dim = 100;
  constexpr int window = 3;
  ModelParameters params(kind, kVocab, dim, window);
  const auto init = random_values(kVocab * dim, 4);
  std::copy(init.begin(), init.end(), params.input.data().begin());
  std::mt19937_64 rng(5);
  std::vector<double> scratch;
  std::vector<TokenId> negatives;
  Window w;
  for (auto _ : state) {
    w.center = static_cast<TokenId>(rng() % kVocab);
    w.context.clear();
    for (int p = -window; p <= window; ++p)
      if (p != 0) w.context.push_back({static_cast<TokenId>(rng() % kVocab), p});
    negatives.resize(prediction_count(kind, w) * 10);
    for (auto& n : negatives) n = static_cast<TokenId>(rng() % kVocab);
    benchmark::DoNotOptimize(train_window(params, w, negatives, 1e-6, scratch));
  }
  state.SetLabel(std::string(to_string(kind)));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TrainWindow)->DenseRange(0, 3);

std::vector<Count> zipf_counts(std::size_t n) {
  std::vector<Count> counts(n);
  for (std::size_t i = 0; i < n; ++i) counts[i] = static_cast<Count>(1'000'000 / (i + 1)) + 1;
  return counts;
}

void BM_NegativeTableBuild(benchmark::State& state) {
  const auto counts = zipf_counts(kVocab);
  const auto size = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_negative_table(counts, size));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(size));
}
BENCHMARK(BM_NegativeTableBuild)->Arg(1'000'000)->Arg(10'000'000)->Unit(benchmark::kMillisecond);

void BM_NegativeTableSample(benchmark::State& state) {
  const auto table = build_negative_table(zipf_counts(kVocab), 1'000'000);
  std::mt19937_64 rng(6);
  for (auto _ : state) benchmark::DoNotOptimize(table.sample(rng()));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NegativeTableSample);

void BM_MicroF1(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  constexpr std::size_t types = 50;
  std::mt19937_64 rng(7);
  std::vector<TypeSet> gold(n, TypeSet(types)), pred(n, TypeSet(types));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < types; ++t) {
      gold[i].set(t, rng() % 13 == 0);
      pred[i].set(t, rng() % 11 == 0);
    }
  for (auto _ : state) {
    benchmark::DoNotOptimize(micro_f1(pred, gold));
    benchmark::DoNotOptimize(strict_accuracy(pred, gold));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_MicroF1)->Arg(1000)->Arg(30000);

void BM_MlpPredict(benchmark::State& state) {
  constexpr std::size_t dim = 200, hidden = 100, types = 50;
  MlpModel model(dim, hidden, types);
  const auto w1 = random_values(model.w1.data().size(), 8);
  std::copy(w1.begin(), w1.end(), model.w1.data().begin());
  const auto x = random_values(dim, 9);
  for (auto _ : state) benchmark::DoNotOptimize(predict_proba(model, x));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MlpPredict);

}  // namespace

BENCHMARK_MAIN();
