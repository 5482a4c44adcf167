#ifndef GROUPREF_PROMPT_H_
#define GROUPREF_PROMPT_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "groupref/corpus.h"
#include "groupref/lexicon.h"

namespace groupref {

enum class WpMode { kNumeric, kNone, kLinguistic };

// How the two low-WP buckets are phrased in the linguistic condition.
enum class LowWpPhrasing {
  kOutGroupWins,  // "Bears is very likely to win." (default)
  kInGroupLoses,  // "Jets is very likely to lose."
};

struct PromptCondition {
  WpMode wp_mode = WpMode::kNumeric;
  bool temperature_scaling = false;
  LowWpPhrasing phrasing = LowWpPhrasing::kOutGroupWins;

  // "numeric", "none", "linguistic", with a "+ts" suffix when scaling.
  std::string Name() const;
  // Inverse of Name(); throws Error("bad-condition").
  static PromptCondition Parse(std::string_view name);
};

std::string_view WpModeName(WpMode mode);

// Five-bucket description of the in-group's WP; buckets are lower-inclusive
// on the percentage: [0,25) [25,45) [45,55) [55,75) [75,100].
// Throws Error("bad-wp") outside [0,1].
std::string LinguisticWp(double wp, std::string_view in_team,
                         std::string_view out_team,
                         LowWpPhrasing phrasing = LowWpPhrasing::kOutGroupWins);

// sin(pi * wp) with scaling, else 1. Evaluated on min(wp, 1 - wp) so the
// endpoints are exactly zero.
double TemperatureFor(double wp, const PromptCondition& condition);

// "71.5%".
std::string FormatWinPercent(double wp);

struct FewShotExample {
  std::string comment;  // segmented, with [SENT] tokens
  std::optional<std::string> parent;
  std::string in_group;
  std::string out_group;
  std::string live_score;
  std::optional<double> win_probability;
  std::vector<std::string> ref_expressions;
  std::string explanation;     // no-WP wording
  std::string explanation_wp;  // WP-aware wording; falls back to explanation
  std::string target;
  bool no_reference = false;  // the "return Target as a copy" example
};

struct FewShotSet {
  std::vector<FewShotExample> examples;
  std::optional<FewShotExample> no_reference;

  // The file is a JSON array of examples; the one flagged
  // "no_reference": true is kept apart.
  static FewShotSet FromJson(const nlohmann::json& doc);
  static FewShotSet Load(const std::filesystem::path& path);
};

// Checks that the target parses against the comment and that
// ref_expressions lists the explicit span surfaces in order. Returns a
// problem description or nullopt.
std::optional<std::string> CheckFewShotExample(const FewShotExample& example);

// Everything the prompt needs about the comment being tagged.
struct QueryContext {
  std::string comment_id;
  std::string comment;  // segmented body
  std::optional<std::string> parent;
  std::string in_group;   // display names
  std::string out_group;
  double wp = 0.5;
};

QueryContext MakeQuery(const GroundedComment& comment, const Lexicon& lexicon);

// The win-probability line for a condition, or nullopt under kNone.
std::optional<std::string> WinProbabilityLine(double wp, std::string_view in,
                                              std::string_view out,
                                              const PromptCondition& condition);

// Instructions, the few-shot examples, the no-reference example and the
// query block ending with the "ref_expressions:" cue. Deterministic.
std::string BuildPrompt(const QueryContext& query,
                        const PromptCondition& condition,
                        const FewShotSet& few_shot);

// Same layout, but examples end with the explanation and the query carries
// the gold ref list and target, ending with the "explanation:" cue.
std::string BuildExplanationPrompt(const QueryContext& query,
                                   const std::vector<std::string>& refs,
                                   std::string_view target,
                                   const PromptCondition& condition,
                                   const FewShotSet& few_shot);

// Python-style list literal: ['Defense', 'a dude', "Mahomes' arm"].
std::string FormatRefList(const std::vector<std::string>& refs);

}  // namespace groupref

#endif  // GROUPREF_PROMPT_H_
