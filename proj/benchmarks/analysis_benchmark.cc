#include <benchmark/benchmark.h>

#include "groupref/analysis.h"
#include "support/test_support.h"

namespace groupref {
namespace {

void BM_WindowStats(benchmark::State& state) {
  testing::TrendSpec spec;
  spec.per_window = static_cast<std::size_t>(state.range(0));
  const auto corpus = testing::SyntheticTrendCorpus(spec);
  const auto variables = DefaultVariables();
  for (auto _ : state) {
    const auto series = WindowStats(corpus, 5, variables,
                                    Normalization::kAllComments,
                                    testing::BundledLexicon());
    benchmark::DoNotOptimize(FitTrend(series, 0).slope);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(corpus.size()));
}
BENCHMARK(BM_WindowStats)->Arg(100)->Arg(1000);

}  // namespace
}  // namespace groupref
