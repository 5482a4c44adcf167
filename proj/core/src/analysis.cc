#include "groupref/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/math/distributions/students_t.hpp>

#include "groupref/utf8.h"

namespace groupref {

std::string_view NormalizationName(Normalization n) {
  return n == Normalization::kAllComments ? "all" : "referencing";
}

Normalization ParseNormalization(std::string_view name) {
  const std::string lowered = utf8::AsciiLower(name);
  if (lowered == "all" || lowered == "all_comments") {
    return Normalization::kAllComments;
  }
  if (lowered == "referencing" || lowered == "referencing_comments") {
    return Normalization::kReferencingComments;
  }
  throw Error("bad-normalization", "unknown normalization '" +
                                       std::string(name) + "'");
}

std::string ReferenceVariable::Name() const {
  const std::string label_name = utf8::AsciiLower(LabelName(label));
  switch (kind) {
    case Kind::kAny:
      return "any";
    case Kind::kNone:
      return "none";
    case Kind::kLabel:
      return label_name;
    case Kind::kSentImplicit:
      return "sent";
    case Kind::kWe:
      return "we[" + label_name + "]";
    case Kind::kThey:
      return "they[" + label_name + "]";
    case Kind::kForm:
      return utf8::AsciiLower(ReferentFormName(form)) + "[" + label_name +
             "]";
  }
  return "";
}

ReferenceVariable ReferenceVariable::Parse(std::string_view name) {
  const std::string lowered = utf8::AsciiLower(utf8::Trim(name));
  ReferenceVariable v;
  if (lowered == "any") return v;
  if (lowered == "none") {
    v.kind = Kind::kNone;
    return v;
  }
  if (lowered == "sent") {
    v.kind = Kind::kSentImplicit;
    return v;
  }
  if (auto label = ParseLabel(lowered)) {
    v.kind = Kind::kLabel;
    v.label = *label;
    return v;
  }
  const auto open = lowered.find('[');
  if (open != std::string::npos && lowered.back() == ']') {
    const std::string head = lowered.substr(0, open);
    const auto label =
        ParseLabel(lowered.substr(open + 1, lowered.size() - open - 2));
    if (label) {
      v.label = *label;
      if (head == "we") {
        v.kind = Kind::kWe;
        return v;
      }
      if (head == "they") {
        v.kind = Kind::kThey;
        return v;
      }
      if (auto form = ParseReferentForm(head)) {
        v.kind = Kind::kForm;
        v.form = *form;
        return v;
      }
    }
  }
  throw Error("bad-variable", "unknown reference variable '" +
                                  std::string(name) + "'");
}

std::vector<ReferenceVariable> DefaultVariables() {
  std::vector<ReferenceVariable> out;
  for (const char* name : {"any", "none", "in", "out", "other", "sent",
                           "we[in]", "they[in]", "they[out]"}) {
    out.push_back(ReferenceVariable::Parse(name));
  }
  return out;
}

JoinResult JoinForAnalysis(std::span<const GroundedComment> grounded,
                           std::span<const TaggedComment> predictions) {
  std::map<std::string_view, const TaggedComment*> by_id;
  for (const auto& p : predictions) by_id.emplace(p.comment_id, &p);
  JoinResult result;
  for (const auto& g : grounded) {
    auto it = by_id.find(g.comment.id);
    if (it == by_id.end()) {
      ++result.missing_predictions;
      continue;
    }
    result.comments.push_back(
        {g.comment.id, g.wp, it->second->text, it->second->spans});
  }
  return result;
}

bool Satisfies(const ReferenceVariable& variable,
               const AnalysisComment& comment, const Lexicon& lexicon) {
  using Kind = ReferenceVariable::Kind;
  switch (variable.kind) {
    case Kind::kAny:
      return !comment.spans.empty();
    case Kind::kNone:
      return comment.spans.empty();
    case Kind::kLabel:
      for (const auto& s : comment.spans) {
        if (s.label == variable.label) return true;
      }
      return false;
    case Kind::kSentImplicit:
      for (const auto& s : comment.spans) {
        if (s.implicit) return true;
      }
      return false;
    case Kind::kWe:
    case Kind::kThey:
    case Kind::kForm:
      break;
  }
  std::optional<std::u32string> text;
  for (const auto& s : comment.spans) {
    if (s.label != variable.label) continue;
    if (!text) text = utf8::Decode(comment.text);
    if (s.end > text->size()) continue;
    if (variable.kind == Kind::kForm) {
      if (ClassifyReferentForm(s, *text, lexicon) == variable.form) {
        return true;
      }
      continue;
    }
    if (s.implicit) continue;
    const std::u32string surface =
        NormalizeSurface(std::u32string_view(*text).substr(
            s.start, s.end - s.start));
    if (variable.kind == Kind::kWe ? lexicon.IsPronounIn(surface)
                                   : lexicon.IsPronounThird(surface)) {
      return true;
    }
  }
  return false;
}

void CheckWidth(int width) {
  if (width < 1 || width > 100 || 100 % width != 0) {
    throw Error("bad-width", "window width " + std::to_string(width) +
                                 " does not divide 100");
  }
}

std::size_t WindowIndex(double wp, int width) {
  CheckWidth(width);
  if (!(wp >= 0.0 && wp <= 1.0)) {
    throw Error("bad-wp", "win probability outside [0,1]");
  }
  const std::size_t count = static_cast<std::size_t>(100 / width);
  // The epsilon keeps values like 0.15 (= 14.999...% in binary) in the
  // window their decimal spelling names.
  const auto index =
      static_cast<std::size_t>(std::floor((wp * 100.0 + 1e-9) / width));
  return std::min(index, count - 1);
}

std::size_t WindowSeries::corpus_size() const {
  std::size_t total = 0;
  for (auto t : totals) total += t;
  return total;
}

WindowSeries WindowStats(std::span<const AnalysisComment> corpus, int width,
                         const std::vector<ReferenceVariable>& variables,
                         Normalization normalization, const Lexicon& lexicon) {
  CheckWidth(width);
  const std::size_t count = static_cast<std::size_t>(100 / width);
  WindowSeries series;
  series.width = width;
  series.normalization = normalization;
  series.variables = variables;
  series.totals.assign(count, 0);
  series.referencing.assign(count, 0);
  for (std::size_t w = 0; w < count; ++w) {
    const double lo = static_cast<double>(w) * width;
    series.lower.push_back(lo);
    series.midpoint.push_back(lo + width / 2.0);
  }
  std::vector<std::vector<std::size_t>> hits(
      variables.size(), std::vector<std::size_t>(count, 0));
  for (const auto& c : corpus) {
    const std::size_t w = WindowIndex(c.wp, width);
    ++series.totals[w];
    if (!c.spans.empty()) ++series.referencing[w];
    for (std::size_t v = 0; v < variables.size(); ++v) {
      if (Satisfies(variables[v], c, lexicon)) ++hits[v][w];
    }
  }
  const auto& denominators = normalization == Normalization::kAllComments
                                 ? series.totals
                                 : series.referencing;
  series.cells.resize(variables.size());
  for (std::size_t v = 0; v < variables.size(); ++v) {
    for (std::size_t w = 0; w < count; ++w) {
      WindowCell cell;
      cell.count = hits[v][w];
      cell.denominator = denominators[w];
      if (cell.denominator > 0) {
        cell.frequency = static_cast<double>(cell.count) /
                         static_cast<double>(cell.denominator);
      }
      series.cells[v].push_back(cell);
    }
  }
  return series;
}

double TrendFit::BandHalfWidth(double x) const {
  const double d = x - x_mean;
  return t_crit * residual_se *
         std::sqrt(1.0 / static_cast<double>(n) + d * d / sxx);
}

TrendFit FitLine(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error("bad-input", "x and y differ in length");
  }
  const std::size_t n = x.size();
  if (n < 2) {
    throw Error("too-few-points",
                "a trend needs at least 2 points, got " + std::to_string(n));
  }
  double x_mean = 0.0;
  double y_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x_mean += x[i];
    y_mean += y[i];
  }
  x_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - x_mean;
    const double dy = y[i] - y_mean;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw Error("degenerate-x", "x has zero variance");

  TrendFit fit;
  fit.n = n;
  fit.x_mean = x_mean;
  fit.sxx = sxx;
  fit.slope = sxy / sxx;
  fit.intercept = y_mean - fit.slope * x_mean;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.Predict(x[i]);
    ss_res += r * r;
  }
  if (syy > 0.0) fit.r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  if (n > 2) {
    const double dof = static_cast<double>(n - 2);
    fit.residual_se = std::sqrt(ss_res / dof);
    fit.slope_se = fit.residual_se / std::sqrt(sxx);
    fit.t_crit = boost::math::quantile(
        boost::math::students_t_distribution<double>(dof), 0.975);
  } else {
    fit.residual_se = std::numeric_limits<double>::quiet_NaN();
    fit.slope_se = std::numeric_limits<double>::quiet_NaN();
    fit.t_crit = std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

TrendFit FitTrend(const WindowSeries& series, std::size_t variable_index) {
  if (variable_index >= series.cells.size()) {
    throw Error("bad-variable", "variable index out of range");
  }
  std::vector<double> x;
  std::vector<double> y;
  const auto& cells = series.cells[variable_index];
  for (std::size_t w = 0; w < cells.size(); ++w) {
    if (!cells[w].frequency) continue;
    x.push_back(series.midpoint[w]);
    y.push_back(*cells[w].frequency);
  }
  return FitLine(x, y);
}

TrendFit FitTrend(const WindowSeries& series,
                  const ReferenceVariable& variable) {
  for (std::size_t v = 0; v < series.variables.size(); ++v) {
    if (series.variables[v] == variable) return FitTrend(series, v);
  }
  throw Error("bad-variable", variable.Name() + " is not in the series");
}

std::vector<DensityBin> CommentDensity(std::span<const double> wps,
                                       int width) {
  CheckWidth(width);
  const std::size_t count = static_cast<std::size_t>(100 / width);
  std::vector<DensityBin> bins(count);
  for (std::size_t w = 0; w < count; ++w) {
    bins[w].lower = static_cast<double>(w) * width;
    bins[w].midpoint = bins[w].lower + width / 2.0;
  }
  for (double wp : wps) ++bins[WindowIndex(wp, width)].count;
  return bins;
}

std::vector<DensityBin> CommentDensity(
    std::span<const AnalysisComment> corpus, int width) {
  std::vector<double> wps;
  wps.reserve(corpus.size());
  for (const auto& c : corpus) wps.push_back(c.wp);
  return CommentDensity(wps, width);
}

}  // namespace groupref
