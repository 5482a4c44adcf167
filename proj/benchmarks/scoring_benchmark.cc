#include <benchmark/benchmark.h>

#include <random>

#include "groupref/scoring.h"
#include "support/test_support.h"

namespace groupref {
namespace {

void BM_MatchSpans(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const std::size_t max_spans = static_cast<std::size_t>(state.range(0));
  const auto gold = testing::RandomSpans(rng, 40 * max_spans, max_spans);
  const auto pred = testing::RandomSpans(rng, 40 * max_spans, max_spans);
  for (auto _ : state) {
    benchmark::DoNotOptimize(MatchSpans(gold, pred).total());
  }
}
BENCHMARK(BM_MatchSpans)->Arg(4)->Arg(8)->Arg(16);

void BM_F1Report(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::vector<TaggedComment> gold, pred;
  for (int i = 0; i < state.range(0); ++i) {
    const std::string id = "c" + std::to_string(i);
    gold.push_back({id, std::string(80, 'x'), testing::RandomSpans(rng, 80, 4)});
    pred.push_back({id, std::string(80, 'x'), testing::RandomSpans(rng, 80, 4)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(F1Report(gold, pred).weighted_macro_f1);
  }
}
BENCHMARK(BM_F1Report)->Arg(1000);

}  // namespace
}  // namespace groupref
