#ifndef GROUPREF_LEXICON_H_
#define GROUPREF_LEXICON_H_

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "groupref/corpus.h"
#include "groupref/tagtext.h"

namespace groupref {

struct TeamEntry {
  std::string name;
  std::vector<std::string> aliases;
};

// Team aliases and closed pronoun/subset-term sets. Immutable after
// construction; safe to share between threads.
//
// File format:
//   {"teams": {team_id: {"name": .., "aliases": [..]}},
//    "pronouns_in": [..], "pronouns_third": [..], "subset_terms": [..]}
class Lexicon {
 public:
  enum class TermKind { kTeamAlias, kPronounIn };

  struct Term {
    std::u32string text;  // lower-case
    TermKind kind = TermKind::kTeamAlias;
    std::vector<TeamId> teams;  // owners, for aliases
  };

  Lexicon() = default;
  static Lexicon FromJson(const nlohmann::json& doc);
  static Lexicon Load(const std::filesystem::path& path);

  const std::map<TeamId, TeamEntry>& teams() const { return teams_; }
  // Team display name, or the id itself when unknown.
  std::string DisplayName(const TeamId& team) const;
  // Case-insensitive lookup by display name or id.
  std::optional<TeamId> FindTeam(std::string_view name_or_id) const;

  // `lowered` is a lower-cased surface with any possessive already removed.
  bool IsPronounIn(std::u32string_view lowered) const;
  bool IsPronounThird(std::u32string_view lowered) const;
  bool IsSubsetTerm(std::u32string_view lowered) const;
  bool IsTeamAlias(std::u32string_view lowered) const;
  const std::vector<std::u32string>& subset_terms() const {
    return subset_terms_;
  }

  // Candidate terms starting with lower-case character `c`, longest first.
  std::span<const Term> TermsStartingWith(char32_t c) const;

 private:
  std::map<TeamId, TeamEntry> teams_;
  std::set<std::u32string> pronouns_in_;
  std::set<std::u32string> pronouns_third_;
  std::vector<std::u32string> subset_terms_;
  std::set<std::u32string> aliases_;
  std::unordered_map<char32_t, std::vector<Term>> index_;
};

// Case-insensitive, word-bounded ensure-tagging: in-group aliases and
// first-person-plural pronouns become IN, opponent aliases OUT, any other
// team's aliases OTHER. Regions overlapping `existing` are skipped. A
// trailing possessive ('s, ', ’s) may follow a match and is not included in
// the span. Returns the merged, sorted span list.
std::vector<Span> LexiconTag(std::string_view segmented_body,
                             const TeamId& team, const TeamId& opponent,
                             const Lexicon& lexicon,
                             std::span<const Span> existing);
std::vector<Span> LexiconTag(const GroundedComment& comment,
                             const Lexicon& lexicon,
                             std::span<const Span> existing);

// Parthood ordering of referents: person < subset < team < team+supporters.
enum class ReferentForm {
  kPerson,
  kSubset,
  kTeam,
  kTeamPlusSupporters,
  kImplicit
};
std::string_view ReferentFormName(ReferentForm form);
std::optional<ReferentForm> ParseReferentForm(std::string_view name);

// Lower-cases and strips a trailing possessive marker.
std::u32string NormalizeSurface(std::u32string_view surface);

ReferentForm ClassifyReferentForm(const Span& span, std::u32string_view text,
                                  const Lexicon& lexicon);

}  // namespace groupref

#endif  // GROUPREF_LEXICON_H_
