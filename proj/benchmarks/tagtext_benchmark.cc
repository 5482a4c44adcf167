#include <benchmark/benchmark.h>

#include <random>

#include "groupref/lexicon.h"
#include "groupref/tagtext.h"
#include "support/test_support.h"

namespace groupref {
namespace {

void BM_ParseTagged(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<std::pair<std::string, std::string>> cases;
  for (std::size_t i = 0; i < 256; ++i) {
    const TaggedComment tc = testing::RandomTaggedComment(rng, i);
    cases.emplace_back(RenderTagged(tc), tc.text);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [rendered, text] = cases[i++ % cases.size()];
    benchmark::DoNotOptimize(ParseTagged(rendered, text).spans.size());
  }
}
BENCHMARK(BM_ParseTagged);

void BM_LexiconTag(benchmark::State& state) {
  const Lexicon& lexicon = testing::BundledLexicon();
  std::mt19937_64 rng(4);
  std::vector<testing::LexiconCase> cases;
  for (int i = 0; i < 256; ++i) {
    cases.push_back(testing::RandomLexiconCase(rng, lexicon));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& c = cases[i++ % cases.size()];
    benchmark::DoNotOptimize(
        LexiconTag(c.segmented_body, c.team, c.opponent, lexicon, {}).size());
  }
}
BENCHMARK(BM_LexiconTag);

}  // namespace
}  // namespace groupref
