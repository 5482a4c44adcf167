#include "groupref/lexicon.h"

#include <algorithm>

#include "groupref/error.h"
#include "groupref/utf8.h"
#include "text_io.h"

namespace groupref {
namespace {

using nlohmann::json;

std::u32string Lowered(std::string_view s) {
  return utf8::AsciiLower(utf8::Decode(utf8::Trim(s)));
}

std::set<std::u32string> LoweredSet(const json& doc, const char* key) {
  std::set<std::u32string> out;
  if (auto it = doc.find(key); it != doc.end()) {
    for (const auto& item : *it) out.insert(Lowered(item.get<std::string>()));
  }
  return out;
}

bool IsApostrophe(char32_t c) { return c == U'\'' || c == 0x2019; }

// Length of a possessive marker at `pos` ("'s", "'", "’s"), 0 if none.
std::size_t PossessiveLength(std::u32string_view text, std::size_t pos) {
  if (pos >= text.size() || !IsApostrophe(text[pos])) return 0;
  if (pos + 1 < text.size() && utf8::AsciiLower(text[pos + 1]) == U's' &&
      (pos + 2 == text.size() || !utf8::IsWordChar(text[pos + 2]))) {
    return 2;
  }
  if (pos + 1 == text.size() || !utf8::IsWordChar(text[pos + 1])) return 1;
  return 0;
}

bool IsEndBoundary(std::u32string_view text, std::size_t end) {
  if (end == text.size()) return true;
  if (utf8::IsWordChar(text[end])) return false;
  if (IsApostrophe(text[end])) return PossessiveLength(text, end) > 0;
  return true;
}

bool Overlaps(const Span& span, std::size_t start, std::size_t end) {
  return start < span.end && span.start < end;
}

}  // namespace

Lexicon Lexicon::FromJson(const json& doc) {
  if (!doc.is_object() || !doc.contains("teams")) {
    throw Error("bad-lexicon", "expected an object with a teams field");
  }
  Lexicon lex;
  lex.pronouns_in_ = LoweredSet(doc, "pronouns_in");
  lex.pronouns_third_ = LoweredSet(doc, "pronouns_third");
  for (const auto& term : LoweredSet(doc, "subset_terms")) {
    lex.subset_terms_.push_back(term);
  }

  std::map<std::u32string, std::vector<TeamId>> owners;
  for (const auto& [id, entry] : doc.at("teams").items()) {
    TeamEntry team;
    team.name = entry.value("name", id);
    if (auto it = entry.find("aliases"); it != entry.end()) {
      team.aliases = it->get<std::vector<std::string>>();
    }
    std::set<std::u32string> forms = {Lowered(team.name)};
    for (const auto& alias : team.aliases) forms.insert(Lowered(alias));
    for (const auto& form : forms) {
      if (form.empty()) continue;
      if (lex.pronouns_in_.count(form) || lex.pronouns_third_.count(form)) {
        throw Error("bad-lexicon", "alias '" + utf8::Encode(form) + "' of " +
                                       id + " collides with a pronoun");
      }
      owners[form].push_back(id);
      lex.aliases_.insert(form);
    }
    lex.teams_.emplace(id, std::move(team));
  }

  for (auto& [form, teams] : owners) {
    lex.index_[form.front()].push_back({form, TermKind::kTeamAlias, teams});
  }
  for (const auto& pronoun : lex.pronouns_in_) {
    if (pronoun.empty()) continue;
    lex.index_[pronoun.front()].push_back({pronoun, TermKind::kPronounIn, {}});
  }
  for (auto& [c, terms] : lex.index_) {
    std::stable_sort(terms.begin(), terms.end(),
                     [](const Term& a, const Term& b) {
                       if (a.text.size() != b.text.size()) {
                         return a.text.size() > b.text.size();
                       }
                       return a.text < b.text;
                     });
  }
  return lex;
}

Lexicon Lexicon::Load(const std::filesystem::path& path) {
  return FromJson(internal::LoadJsonFile(path));
}

std::string Lexicon::DisplayName(const TeamId& team) const {
  auto it = teams_.find(team);
  return it == teams_.end() ? team : it->second.name;
}

std::optional<TeamId> Lexicon::FindTeam(std::string_view name_or_id) const {
  const std::string wanted = utf8::AsciiLower(utf8::Trim(name_or_id));
  for (const auto& [id, entry] : teams_) {
    if (utf8::AsciiLower(id) == wanted ||
        utf8::AsciiLower(entry.name) == wanted) {
      return id;
    }
  }
  return std::nullopt;
}

bool Lexicon::IsPronounIn(std::u32string_view lowered) const {
  return pronouns_in_.count(std::u32string(lowered)) > 0;
}
bool Lexicon::IsPronounThird(std::u32string_view lowered) const {
  return pronouns_third_.count(std::u32string(lowered)) > 0;
}
bool Lexicon::IsSubsetTerm(std::u32string_view lowered) const {
  return std::find(subset_terms_.begin(), subset_terms_.end(), lowered) !=
         subset_terms_.end();
}
bool Lexicon::IsTeamAlias(std::u32string_view lowered) const {
  return aliases_.count(std::u32string(lowered)) > 0;
}

std::span<const Lexicon::Term> Lexicon::TermsStartingWith(char32_t c) const {
  auto it = index_.find(c);
  if (it == index_.end()) return {};
  return it->second;
}

// -------------------------------------------------------------- tagging

std::vector<Span> LexiconTag(std::string_view segmented_body,
                             const TeamId& team, const TeamId& opponent,
                             const Lexicon& lexicon,
                             std::span<const Span> existing) {
  const std::u32string text = utf8::Decode(segmented_body);
  const std::u32string lowered = utf8::AsciiLower(text);

  std::vector<Span> blocked(existing.begin(), existing.end());
  for (std::size_t p : SentinelPositions(text)) {
    blocked.push_back({p, p + kSentinel32.size(), TagLabel::kIn, true, {}});
  }
  auto is_blocked = [&](std::size_t start, std::size_t end) {
    return std::any_of(blocked.begin(), blocked.end(),
                       [&](const Span& s) { return Overlaps(s, start, end); });
  };

  std::vector<Span> added;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (pos > 0 && utf8::IsWordChar(text[pos - 1])) {
      ++pos;
      continue;
    }
    const Lexicon::Term* hit = nullptr;
    for (const auto& term : lexicon.TermsStartingWith(lowered[pos])) {
      if (lowered.compare(pos, term.text.size(), term.text) == 0 &&
          IsEndBoundary(text, pos + term.text.size())) {
        hit = &term;
        break;
      }
    }
    if (hit == nullptr) {
      ++pos;
      continue;
    }
    const std::size_t end = pos + hit->text.size();
    if (is_blocked(pos, end)) {
      ++pos;
      continue;
    }
    TagLabel label = TagLabel::kIn;
    if (hit->kind == Lexicon::TermKind::kTeamAlias) {
      auto owns = [&](const TeamId& id) {
        return std::find(hit->teams.begin(), hit->teams.end(), id) !=
               hit->teams.end();
      };
      label = owns(team)       ? TagLabel::kIn
              : owns(opponent) ? TagLabel::kOut
                               : TagLabel::kOther;
    }
    added.push_back({pos, end, label, false, std::nullopt});
    pos = end;
  }
  return MergeTags(existing, added);
}

std::vector<Span> LexiconTag(const GroundedComment& comment,
                             const Lexicon& lexicon,
                             std::span<const Span> existing) {
  return LexiconTag(comment.segmented_body, comment.comment.team,
                    comment.opponent, lexicon, existing);
}

// ---------------------------------------------------------- referent form

std::string_view ReferentFormName(ReferentForm form) {
  switch (form) {
    case ReferentForm::kPerson:
      return "PERSON";
    case ReferentForm::kSubset:
      return "SUBSET";
    case ReferentForm::kTeam:
      return "TEAM";
    case ReferentForm::kTeamPlusSupporters:
      return "TEAM_PLUS_SUPPORTERS";
    case ReferentForm::kImplicit:
      return "IMPLICIT";
  }
  return "?";
}

std::optional<ReferentForm> ParseReferentForm(std::string_view name) {
  for (auto form : {ReferentForm::kPerson, ReferentForm::kSubset,
                    ReferentForm::kTeam, ReferentForm::kTeamPlusSupporters,
                    ReferentForm::kImplicit}) {
    if (utf8::AsciiLower(ReferentFormName(form)) == utf8::AsciiLower(name)) {
      return form;
    }
  }
  return std::nullopt;
}

std::u32string NormalizeSurface(std::u32string_view surface) {
  while (!surface.empty() && utf8::IsSpace(surface.front())) {
    surface.remove_prefix(1);
  }
  while (!surface.empty() && utf8::IsSpace(surface.back())) {
    surface.remove_suffix(1);
  }
  std::u32string out = utf8::AsciiLower(surface);
  if (out.size() >= 2 && IsApostrophe(out[out.size() - 2]) &&
      out.back() == U's') {
    out.resize(out.size() - 2);
  } else if (!out.empty() && IsApostrophe(out.back())) {
    out.pop_back();
  }
  return out;
}

namespace {

bool ContainsWord(std::u32string_view haystack, std::u32string_view word) {
  std::size_t pos = 0;
  while ((pos = haystack.find(word, pos)) != std::u32string_view::npos) {
    const bool left = pos == 0 || !utf8::IsWordChar(haystack[pos - 1]);
    const std::size_t end = pos + word.size();
    const bool right = end == haystack.size() || IsEndBoundary(haystack, end);
    if (left && right) return true;
    ++pos;
  }
  return false;
}

}  // namespace

ReferentForm ClassifyReferentForm(const Span& span, std::u32string_view text,
                                  const Lexicon& lexicon) {
  if (span.implicit) return ReferentForm::kImplicit;
  if (span.end > text.size() || span.start >= span.end) {
    return ReferentForm::kPerson;
  }
  const std::u32string surface =
      NormalizeSurface(text.substr(span.start, span.end - span.start));
  if (lexicon.IsPronounIn(surface)) return ReferentForm::kTeamPlusSupporters;
  for (const auto& term : lexicon.subset_terms()) {
    if (ContainsWord(surface, term)) return ReferentForm::kSubset;
  }
  std::u32string_view bare = surface;
  if (bare.substr(0, 4) == U"the ") bare.remove_prefix(4);
  if (lexicon.IsTeamAlias(bare)) return ReferentForm::kTeam;
  if (lexicon.IsPronounThird(surface)) return ReferentForm::kTeam;
  return ReferentForm::kPerson;
}

}  // namespace groupref
