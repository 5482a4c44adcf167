#ifndef GROUPREF_SCORING_H_
#define GROUPREF_SCORING_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "groupref/interchange.h"
#include "groupref/tagtext.h"

namespace groupref {

// Boundary tolerance for partial credit: the larger of the start and end
// offset differences.
inline constexpr std::size_t kHalfCreditDistance = 3;
inline constexpr std::size_t kQuarterCreditDistance = 5;

// 1.0 for identical offsets, 0.5 within 3 characters, 0.25 within 5, else 0.
// Spans with different labels never earn credit.
double PairCredit(const Span& gold, const Span& predicted);

struct CreditPair {
  std::size_t gold = 0;       // index into the gold list
  std::size_t predicted = 0;  // index into the predicted list
  double credit = 0.0;
};

struct CreditAssignment {
  std::vector<CreditPair> pairs;
  std::vector<std::size_t> unmatched_gold;
  std::vector<std::size_t> unmatched_predicted;

  double total() const;
};

// One-to-one assignment maximizing total credit. Among optimal assignments,
// gold spans are settled in start order, each preferring the earliest
// eligible predicted span.
CreditAssignment MatchSpans(std::span<const Span> gold,
                            std::span<const Span> predicted);

struct LabelScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double credit = 0.0;
  std::size_t gold_support = 0;
  std::size_t predicted = 0;
};

// Precision/recall from pooled credit. With no predictions precision is 0
// unless gold is empty too (then 1); recall mirrors this.
LabelScore ScoreLabel(double credit, std::size_t predicted,
                      std::size_t gold);

struct ScoreReport {
  std::array<LabelScore, 3> per_label;
  double weighted_macro_f1 = 0.0;  // weights = gold support per label
  std::size_t comments = 0;
  std::size_t parse_failures = 0;  // gold comments with no prediction

  const LabelScore& operator[](TagLabel label) const {
    return per_label[LabelIndex(label)];
  }
};

// Missing predictions count as empty span lists; predictions for comments
// absent from gold are ignored.
ScoreReport F1Report(std::span<const TaggedComment> gold,
                     std::span<const TaggedComment> predicted);

nlohmann::json ScoreReportToJson(const ScoreReport& report);

// Plain-text table: one column per named system/condition, rows IN, OUT,
// OTHER and Overall, values as F1 percentages.
std::string RenderScoreTable(
    std::span<const std::pair<std::string, ScoreReport>> columns);

// ------------------------------------------------------------- agreement

// Category columns used for per-comment units.
enum class AgreementUnit { kIn = 0, kOut = 1, kOther = 2, kNone = 3 };

struct AgreementTable {
  std::vector<std::vector<int>> counts;  // items x categories
  int raters = 0;
  std::vector<std::string> item_ids;
};

// Dominant label of a comment: the most frequent span label (ties favour
// IN, then OUT), or kNone when there are no spans.
AgreementUnit DominantUnit(std::span<const Span> spans);

// One row per comment id present in every rater's corpus.
AgreementTable BuildAgreementTable(std::span<const TaggedCorpus> raters);

// (P - Pe) / (1 - Pe). nullopt when Pe == 1 (only one category in use).
// Throws Error("bad-table") when a row does not sum to the rater count or
// when there are fewer than two raters or no items.
std::optional<double> FleissKappa(const AgreementTable& table);

// Mean over gold comments of credit / max(#gold, #annotator); comments with
// no spans on either side score 1.
double PairwiseAccuracy(std::span<const TaggedComment> annotator,
                        std::span<const TaggedComment> gold);

// -------------------------------------------------------------- bootstrap

struct BootstrapResult {
  double p_value = 1.0;
  double mean_delta = 0.0;      // mean of macro-F1(A) - macro-F1(B)
  double observed_delta = 0.0;  // on the full gold set
  std::size_t iterations = 0;
};

// Paired bootstrap over gold comment ids. p is the fraction of resamples in
// which the observed winner does not win (1.0 when the observed systems
// tie). Deterministic for a given seed. Throws Error("bad-iterations") for
// zero iterations.
BootstrapResult BootstrapCompare(std::span<const TaggedComment> system_a,
                                 std::span<const TaggedComment> system_b,
                                 std::span<const TaggedComment> gold,
                                 std::size_t iterations, std::uint64_t seed);

}  // namespace groupref

#endif  // GROUPREF_SCORING_H_
