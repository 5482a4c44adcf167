#ifndef GROUPREF_TESTS_SUPPORT_TEST_SUPPORT_H_
#define GROUPREF_TESTS_SUPPORT_TEST_SUPPORT_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "groupref/analysis.h"
#include "groupref/corpus.h"
#include "groupref/lexicon.h"
#include "groupref/prompt.h"
#include "groupref/scoring.h"
#include "groupref/tagtext.h"

namespace groupref::testing {

std::filesystem::path DataDir();
const Lexicon& BundledLexicon();
FewShotSet BundledFewShot();

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, const std::string& body);

// ---------------------------------------------------------------- oracles

// Maximum total credit over every one-to-one gold/prediction assignment, by
// exhaustive search.
double BruteForceMaxCredit(std::span<const Span> gold,
                           std::span<const Span> predicted);

// Fleiss kappa evaluated literally from its definition.
double DefinitionalKappa(const std::vector<std::vector<int>>& counts);

// WP by scanning every play: the last play (in order) whose end time is
// <= t, else the first play; complemented for the away side.
double LinearScanWp(const GameRecord& game, EpochSeconds t, Side side);

// Union of model and lexicon spans where, position by position, a model
// span claims characters first; a lexicon span survives only if none of its
// characters are claimed.
std::vector<Span> PriorityMergeOracle(std::size_t text_length,
                                      std::span<const Span> model,
                                      std::span<const Span> lexicon);

// -------------------------------------------------------------- generators

// Non-overlapping spans over [0, length) with random labels.
std::vector<Span> RandomSpans(std::mt19937_64& rng, std::size_t length,
                              std::size_t max_spans);

// A valid segmented comment whose spans render and parse unambiguously:
// distinct words (some non-ASCII), explicit spans separated by untagged
// words, implicit spans on sentinels of sentences without explicit spans.
TaggedComment RandomTaggedComment(std::mt19937_64& rng, std::size_t index);

// Lexicon-taggable comment built from team aliases, pronouns and filler.
struct LexiconCase {
  std::string segmented_body;
  TeamId team;
  TeamId opponent;
};
LexiconCase RandomLexiconCase(std::mt19937_64& rng, const Lexicon& lexicon);

// A corpus whose per-window frequencies follow exact lines in the window
// midpoint x (percent): in = in0 + in_slope*x, out = out0 + out_slope*x,
// we[in] = we0 + we_slope*x (a subset of the in comments). Every comment
// has at most one span; `per_window` comments per 5% window.
struct TrendSpec {
  double in0 = 0.60, in_slope = -0.0020;
  double out0 = 0.05, out_slope = 0.0010;
  double we0 = 0.30, we_slope = -0.0010;
  std::size_t per_window = 1000;
};
std::vector<AnalysisComment> SyntheticTrendCorpus(const TrendSpec& spec);

// The game used by alignment tests: plays end at 100, 160 and 220 with
// home WPs .55, .60, .40.
GameRecord ThreePlayGame();

}  // namespace groupref::testing

#endif  // GROUPREF_TESTS_SUPPORT_TEST_SUPPORT_H_
