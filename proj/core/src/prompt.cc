#include "groupref/prompt.h"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "groupref/error.h"
#include "groupref/tagtext.h"
#include "groupref/utf8.h"
#include "text_io.h"

namespace groupref {
namespace {

constexpr std::string_view kTaskParagraph =
    "Tag references to entities as in-group ([IN]), out-group ([OUT]) or "
    "other ([OTHER]) in live, online sports comments during NFL games. The "
    "input is the comment, the parent comment (if the comment is a reply, "
    "else it will be 'None'), the in-group team the commenter supports and "
    "the out-group opponent team during that game. Using knowledge of "
    "American football and contextual language understanding, identify words "
    "and phrases denoting entities (players, teams, city names, sub-groups "
    "within the team) that refer to the in-group ([IN] - team the commenter "
    "supports), out-group ([OUT] - the opponent) or other teams ([OTHER] - "
    "some other team in the NFL that is not the in-group or the opponent), "
    "with respect to the commenter. Return the list of words/phrases that "
    "are to be tagged (ref_expressions), an explanation reasoning over why "
    "these words and phrases in comment should be tagged and with what tag, "
    "and the target comment itself with relevant words/phrases replaced with "
    "the respective tags ([IN], [OUT] or [OTHER]) in your final output.";

constexpr std::string_view kWpDefinition =
    "The win probability is the probability of the in-group winning the game "
    "at the time of the comment - if the win probability is high, the "
    "in-group team is probably doing well and going to win.";

constexpr std::string_view kSentenceParagraph =
    "Each sentence in a comment is separated by a [SENT] token. Sometimes a "
    "sentence in the comment will be about the in/out/other group but not "
    "have an explicit word/phrase that refers to the group; In such cases, "
    "tag the [SENT] token for that sentence with the corresponding tag "
    "label.";

constexpr std::string_view kNoReferenceParagraph =
    "Some comments will have no explicit or implicit reference to the "
    "in-group, out-group, or other, or it could be extremely hard to "
    "disambiguate any references based on given information. In such cases, "
    "return Target as a copy of Comment, justify this with the Explanation, "
    "\"No explicit or implicit references to tag.\", and return [] for "
    "ref_expressions. Here is an example:";

constexpr std::string_view kTagRequest =
    "Now tag only the relevant words/phrases in the following comment as "
    "either in-group ([IN]), out-group ([OUT]), or other ([OTHER]), if any. "
    "First return the list of words to be tagged, then explain your "
    "reasoning as to why these words/phrases should be tagged from comment "
    "and with which tags, and finally return the tagged comment in that "
    "order.";

constexpr std::string_view kExplainRequest =
    "Now explain why the listed words/phrases in the following comment are "
    "tagged as shown in target, with respect to the commenter. Return only "
    "the explanation.";

std::string ExamplesIntro(std::size_t count) {
  return "Here are " + std::to_string(count) +
         " examples, with ref_expressions being the list of words/phrases to "
         "be tagged from comment, explanation being a reasonable reason for "
         "why these words/phrases should be tagged with appropriate tags, and "
         "target being the correct tagged output for comment.";
}

enum class Layout { kTagging, kExplaining };

void AppendContext(std::string& out, std::string_view comment,
                   const std::optional<std::string>& parent,
                   std::string_view in, std::string_view out_team,
                   std::optional<double> wp,
                   const PromptCondition& condition) {
  out += "comment: ";
  out += comment;
  out += "\n\nparent comment: ";
  out += parent ? *parent : std::string("None");
  out += "\n\nin-group: ";
  out += in;
  out += "\n\nout-group: ";
  out += out_team;
  out += "\n\n";
  if (wp) {
    if (auto line = WinProbabilityLine(*wp, in, out_team, condition)) {
      out += *line;
      out += "\n\n";
    }
  }
}

void AppendExample(std::string& out, const FewShotExample& example,
                   const PromptCondition& condition, Layout layout) {
  AppendContext(out, example.comment, example.parent, example.in_group,
                example.out_group, example.win_probability, condition);
  const std::string& explanation =
      condition.wp_mode != WpMode::kNone && !example.explanation_wp.empty()
          ? example.explanation_wp
          : example.explanation;
  out += "ref_expressions: " + FormatRefList(example.ref_expressions) + "\n\n";
  if (layout == Layout::kTagging) {
    out += "explanation: " + explanation + "\n\n";
    out += "target: " + example.target + "\n\n";
  } else {
    out += "target: " + example.target + "\n\n";
    out += "explanation: " + explanation + "\n\n";
  }
}

std::string BuildHead(const PromptCondition& condition,
                      const FewShotSet& few_shot, Layout layout) {
  std::string out;
  out += kTaskParagraph;
  out += "\n\n";
  if (condition.wp_mode != WpMode::kNone) {
    out += kWpDefinition;
    out += "\n\n";
  }
  out += kSentenceParagraph;
  out += "\n\n";
  out += ExamplesIntro(few_shot.examples.size());
  out += "\n\n";
  for (const auto& example : few_shot.examples) {
    AppendExample(out, example, condition, layout);
  }
  if (few_shot.no_reference) {
    out += kNoReferenceParagraph;
    out += "\n\n";
    AppendExample(out, *few_shot.no_reference, condition, layout);
  }
  out += layout == Layout::kTagging ? kTagRequest : kExplainRequest;
  out += "\n\n";
  return out;
}

FewShotExample ExampleFromJson(const nlohmann::json& j) {
  FewShotExample e;
  e.comment = j.at("comment").get<std::string>();
  if (auto it = j.find("parent"); it != j.end() && !it->is_null()) {
    e.parent = it->get<std::string>();
  }
  e.in_group = j.at("in_group").get<std::string>();
  e.out_group = j.at("out_group").get<std::string>();
  e.live_score = j.value("live_score", "");
  if (auto it = j.find("win_probability"); it != j.end() && !it->is_null()) {
    e.win_probability = it->get<double>();
  }
  e.ref_expressions =
      j.value("ref_expressions", std::vector<std::string>{});
  e.explanation = j.at("explanation").get<std::string>();
  e.explanation_wp = j.value("explanation_wp", "");
  e.target = j.at("target").get<std::string>();
  e.no_reference = j.value("no_reference", false);
  return e;
}

}  // namespace

std::string_view WpModeName(WpMode mode) {
  switch (mode) {
    case WpMode::kNumeric:
      return "numeric";
    case WpMode::kNone:
      return "none";
    case WpMode::kLinguistic:
      return "linguistic";
  }
  return "?";
}

std::string PromptCondition::Name() const {
  std::string name(WpModeName(wp_mode));
  if (temperature_scaling) name += "+ts";
  return name;
}

PromptCondition PromptCondition::Parse(std::string_view name) {
  PromptCondition c;
  std::string lowered = utf8::AsciiLower(utf8::Trim(name));
  constexpr std::string_view kSuffix = "+ts";
  if (lowered.size() > kSuffix.size() &&
      lowered.compare(lowered.size() - kSuffix.size(), kSuffix.size(),
                      kSuffix) == 0) {
    c.temperature_scaling = true;
    lowered.resize(lowered.size() - kSuffix.size());
  }
  if (lowered == "numeric") {
    c.wp_mode = WpMode::kNumeric;
  } else if (lowered == "none" || lowered == "no-wp") {
    c.wp_mode = WpMode::kNone;
  } else if (lowered == "linguistic") {
    c.wp_mode = WpMode::kLinguistic;
  } else {
    throw Error("bad-condition", "unknown prompt condition '" +
                                     std::string(name) + "'");
  }
  return c;
}

std::string LinguisticWp(double wp, std::string_view in_team,
                         std::string_view out_team, LowWpPhrasing phrasing) {
  if (!(wp >= 0.0 && wp <= 1.0)) {
    throw Error("bad-wp", "win probability outside [0,1]");
  }
  const bool lose = phrasing == LowWpPhrasing::kInGroupLoses;
  if (wp < 0.25) {
    return lose ? std::string(in_team) + " is very likely to lose."
                : std::string(out_team) + " is very likely to win.";
  }
  if (wp < 0.45) {
    return lose ? std::string(in_team) + " is likely to lose."
                : std::string(out_team) + " is likely to win.";
  }
  if (wp < 0.55) return "Both teams are equally likely to win.";
  if (wp < 0.75) return std::string(in_team) + " is likely to win.";
  return std::string(in_team) + " is very likely to win.";
}

double TemperatureFor(double wp, const PromptCondition& condition) {
  if (!condition.temperature_scaling) return 1.0;
  const double folded = std::min(wp, 1.0 - wp);
  if (folded <= 0.0) return 0.0;
  return std::sin(std::numbers::pi * folded);
}

std::string FormatWinPercent(double wp) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * wp);
  return buf;
}

FewShotSet FewShotSet::FromJson(const nlohmann::json& doc) {
  if (!doc.is_array()) throw Error("bad-few-shot", "expected a JSON array");
  FewShotSet set;
  try {
    for (const auto& item : doc) {
      FewShotExample e = ExampleFromJson(item);
      if (e.no_reference) {
        set.no_reference = std::move(e);
      } else {
        set.examples.push_back(std::move(e));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad-few-shot", e.what());
  }
  return set;
}

FewShotSet FewShotSet::Load(const std::filesystem::path& path) {
  return FromJson(internal::LoadJsonFile(path));
}

std::optional<std::string> CheckFewShotExample(const FewShotExample& example) {
  ParseResult parsed;
  try {
    parsed = ParseTagged(example.target, example.comment);
  } catch (const Error& e) {
    return std::string("target does not align: ") + e.what();
  }
  const std::u32string text = utf8::Decode(example.comment);
  std::vector<std::string> surfaces;
  for (const auto& span : parsed.spans) {
    if (!span.implicit) surfaces.push_back(SpanSurface(text, span));
  }
  if (surfaces != example.ref_expressions) {
    return "ref_expressions " + FormatRefList(example.ref_expressions) +
           " differ from tagged spans " + FormatRefList(surfaces);
  }
  return std::nullopt;
}

QueryContext MakeQuery(const GroundedComment& comment, const Lexicon& lexicon) {
  QueryContext q;
  q.comment_id = comment.comment.id;
  q.comment = comment.segmented_body;
  q.parent = comment.comment.parent_body;
  q.in_group = lexicon.DisplayName(comment.comment.team);
  q.out_group = lexicon.DisplayName(comment.opponent);
  q.wp = comment.wp;
  return q;
}

std::optional<std::string> WinProbabilityLine(
    double wp, std::string_view in, std::string_view out,
    const PromptCondition& condition) {
  switch (condition.wp_mode) {
    case WpMode::kNone:
      return std::nullopt;
    case WpMode::kNumeric:
      return "win probability: " + FormatWinPercent(wp);
    case WpMode::kLinguistic:
      return "win probability: " + LinguisticWp(wp, in, out, condition.phrasing);
  }
  return std::nullopt;
}

std::string BuildPrompt(const QueryContext& query,
                        const PromptCondition& condition,
                        const FewShotSet& few_shot) {
  std::string out = BuildHead(condition, few_shot, Layout::kTagging);
  AppendContext(out, query.comment, query.parent, query.in_group,
                query.out_group, query.wp, condition);
  out += "ref_expressions:";
  return out;
}

std::string BuildExplanationPrompt(const QueryContext& query,
                                   const std::vector<std::string>& refs,
                                   std::string_view target,
                                   const PromptCondition& condition,
                                   const FewShotSet& few_shot) {
  std::string out = BuildHead(condition, few_shot, Layout::kExplaining);
  AppendContext(out, query.comment, query.parent, query.in_group,
                query.out_group, query.wp, condition);
  out += "ref_expressions: " + FormatRefList(refs) + "\n\n";
  out += "target: ";
  out += target;
  out += "\n\nexplanation:";
  return out;
}

std::string FormatRefList(const std::vector<std::string>& refs) {
  std::string out = "[";
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (i > 0) out += ", ";
    const std::string& r = refs[i];
    const char quote = (r.find('\'') != std::string::npos &&
                        r.find('"') == std::string::npos)
                           ? '"'
                           : '\'';
    out += quote;
    for (char c : r) {
      if (c == '\\' || c == quote) out += '\\';
      out += c;
    }
    out += quote;
  }
  out += "]";
  return out;
}

}  // namespace groupref
