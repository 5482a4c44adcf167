#ifndef GROUPREF_ANALYSIS_H_
#define GROUPREF_ANALYSIS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "groupref/corpus.h"
#include "groupref/interchange.h"
#include "groupref/lexicon.h"

namespace groupref {

enum class Normalization {
  kAllComments,          // denominator: every comment in the window
  kReferencingComments,  // denominator: comments with at least one span
};
// "all" / "referencing".
std::string_view NormalizationName(Normalization n);
// Throws Error("bad-normalization").
Normalization ParseNormalization(std::string_view name);

// A per-comment boolean feature whose frequency is tracked across WP.
struct ReferenceVariable {
  enum class Kind {
    kAny,           // at least one span
    kNone,          // no spans
    kLabel,         // at least one span with `label`
    kSentImplicit,  // at least one implicit span
    kWe,            // `label` span whose surface is a first-person plural
    kThey,          // `label` span whose surface is a third-person plural
    kForm,          // `label` span of referent form `form`
  };
  Kind kind = Kind::kAny;
  TagLabel label = TagLabel::kIn;
  ReferentForm form = ReferentForm::kTeam;

  // "any", "none", "in", "out", "other", "sent", "we[in]", "they[out]",
  // "team[in]", "person[out]", ...
  std::string Name() const;
  // Inverse of Name(); throws Error("bad-variable").
  static ReferenceVariable Parse(std::string_view name);

  bool operator==(const ReferenceVariable&) const = default;
};

// any, none, in, out, other, sent, we[in], they[in], they[out].
std::vector<ReferenceVariable> DefaultVariables();

// A tagged comment placed on the WP axis.
struct AnalysisComment {
  std::string comment_id;
  double wp = 0.0;  // fraction
  std::string text;
  std::vector<Span> spans;
};

struct JoinResult {
  std::vector<AnalysisComment> comments;  // grounded order
  std::size_t missing_predictions = 0;    // grounded comments left out
};

// Joins grounded comments with predictions on comment_id.
JoinResult JoinForAnalysis(std::span<const GroundedComment> grounded,
                           std::span<const TaggedComment> predictions);

bool Satisfies(const ReferenceVariable& variable,
               const AnalysisComment& comment, const Lexicon& lexicon);

// Window index of `wp` for windows [k*w, (k+1)*w) percent, the last one
// closed at 100. Throws Error("bad-width") unless width divides 100.
std::size_t WindowIndex(double wp, int width);
void CheckWidth(int width);

struct WindowCell {
  std::size_t count = 0;
  std::size_t denominator = 0;
  std::optional<double> frequency;  // nullopt for an empty denominator
};

struct WindowSeries {
  int width = 5;
  Normalization normalization = Normalization::kAllComments;
  std::vector<ReferenceVariable> variables;
  std::vector<double> lower;     // percent
  std::vector<double> midpoint;  // percent
  std::vector<std::size_t> totals;       // comments per window
  std::vector<std::size_t> referencing;  // comments with >= 1 span
  std::vector<std::vector<WindowCell>> cells;  // [variable][window]

  std::size_t windows() const { return lower.size(); }
  std::size_t corpus_size() const;
};

WindowSeries WindowStats(std::span<const AnalysisComment> corpus, int width,
                         const std::vector<ReferenceVariable>& variables,
                         Normalization normalization, const Lexicon& lexicon);

// OLS fit y = intercept + slope * x with standard errors and a 95%
// confidence band.
struct TrendFit {
  double slope = 0.0;  // frequency per WP percentage point
  double intercept = 0.0;
  double r2 = 0.0;  // 0 when y is constant
  std::size_t n = 0;
  double x_mean = 0.0;
  double sxx = 0.0;
  // Residual standard error and t quantile; NaN when n == 2.
  double residual_se = 0.0;
  double t_crit = 0.0;
  double slope_se = 0.0;

  double Predict(double x) const { return intercept + slope * x; }
  // Half-width of the 95% confidence band of the mean response at x.
  double BandHalfWidth(double x) const;
  double SlopeCiLow() const { return slope - t_crit * slope_se; }
  double SlopeCiHigh() const { return slope + t_crit * slope_se; }
};

// Throws Error("too-few-points") for n < 2 and Error("degenerate-x") when x
// has no variance.
TrendFit FitLine(std::span<const double> x, std::span<const double> y);

// Fits frequency against window midpoint over the non-empty windows.
TrendFit FitTrend(const WindowSeries& series, std::size_t variable_index);
TrendFit FitTrend(const WindowSeries& series,
                  const ReferenceVariable& variable);

struct DensityBin {
  double lower = 0.0;
  double midpoint = 0.0;
  std::size_t count = 0;
};

std::vector<DensityBin> CommentDensity(std::span<const double> wps, int width);
std::vector<DensityBin> CommentDensity(
    std::span<const AnalysisComment> corpus, int width);

}  // namespace groupref

#endif  // GROUPREF_ANALYSIS_H_
