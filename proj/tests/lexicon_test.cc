#include "groupref/lexicon.h"

#include <gtest/gtest.h>

#include <random>

#include "groupref/utf8.h"
#include "support/test_support.h"

namespace groupref {
namespace {

using testing::BundledLexicon;
using testing::RandomLexiconCase;

struct Tagged {
  std::string surface;
  TagLabel label;
};

std::vector<Tagged> Surfaces(const std::string& text,
                             const std::vector<Span>& spans) {
  const std::u32string decoded = utf8::Decode(text);
  std::vector<Tagged> out;
  for (const auto& s : spans) out.push_back({SpanSurface(decoded, s), s.label});
  return out;
}

void ExpectTags(const std::string& text, const std::vector<Span>& spans,
                const std::vector<Tagged>& expected) {
  const auto got = Surfaces(text, spans);
  ASSERT_EQ(got.size(), expected.size()) << text;
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].surface, expected[i].surface) << text;
    EXPECT_EQ(got[i].label, expected[i].label) << expected[i].surface;
  }
}

TEST(LexiconTagTest, WeIsInGroup) {
  const std::string text = "[SENT] How are we this shit on defense";
  const auto spans = LexiconTag(text, "PIT", "PHI", BundledLexicon(), {});
  ExpectTags(text, spans, {{"we", TagLabel::kIn}});
}

TEST(LexiconTagTest, OtherTeamsAreOther) {
  const std::string text =
      "[SENT] Cards and rams are gonna be in the post-season regardless, so "
      "I don't really care about them losing unless they play us.";
  const auto spans = LexiconTag(text, "SF", "JAX", BundledLexicon(), {});
  ExpectTags(text, spans,
             {{"Cards", TagLabel::kOther},
              {"rams", TagLabel::kOther},
              {"us", TagLabel::kIn}});
}

TEST(LexiconTagTest, OpponentAliasIsOut) {
  const std::string text =
      "[SENT] The chiefs got straight fucked with that Herbert INT getting "
      "called dead . [SENT] Suck it , KC !";
  const auto spans = LexiconTag(text, "LAC", "KC", BundledLexicon(), {});
  ExpectTags(text, spans,
             {{"chiefs", TagLabel::kOut}, {"KC", TagLabel::kOut}});
}

TEST(LexiconTagTest, WordBoundariesAndPossessives) {
  const Lexicon& lexicon = BundledLexicon();
  const std::string text =
      "[SENT] Jetson and Bearsfan talk. [SENT] The Jets's D and Bears' O, "
      "Gang Green!";
  const auto spans = LexiconTag(text, "NYJ", "CHI", lexicon, {});
  ExpectTags(text, spans,
             {{"Jets", TagLabel::kIn},
              {"Bears", TagLabel::kOut},
              {"Gang Green", TagLabel::kIn}});
}

TEST(LexiconTagTest, SkipsExistingSpans) {
  const std::string text = "[SENT] we love the Jets";
  const std::vector<Span> existing = {{7, 14, TagLabel::kOut, false, {}}};
  const auto spans = LexiconTag(text, "NYJ", "CHI", BundledLexicon(), existing);
  ExpectTags(text, spans,
             {{"we love", TagLabel::kOut}, {"Jets", TagLabel::kIn}});
}

TEST(LexiconTagTest, IdempotentOnRandomComments) {
  const Lexicon& lexicon = BundledLexicon();
  std::mt19937_64 rng(31);
  std::size_t tagged = 0;
  for (int i = 0; i < 500; ++i) {
    const auto c = RandomLexiconCase(rng, lexicon);
    const auto once = LexiconTag(c.segmented_body, c.team, c.opponent,
                                 lexicon, {});
    const auto twice = LexiconTag(c.segmented_body, c.team, c.opponent,
                                  lexicon, once);
    ASSERT_EQ(once, twice) << c.segmented_body;
    ASSERT_FALSE(CheckSpans(utf8::Decode(c.segmented_body), once).has_value())
        << c.segmented_body;
    tagged += once.size();
  }
  EXPECT_GT(tagged, 500u);  // the generator exercises the tagger
}

TEST(LexiconTagTest, NeverTagsInsideExistingSpans) {
  const Lexicon& lexicon = BundledLexicon();
  std::mt19937_64 rng(32);
  for (int i = 0; i < 200; ++i) {
    const auto c = RandomLexiconCase(rng, lexicon);
    const std::size_t length = utf8::Length(c.segmented_body);
    // Claim the middle third of the text as one existing explicit span,
    // trimmed off any sentinel.
    std::vector<Span> existing;
    const auto text = utf8::Decode(c.segmented_body);
    const auto sentinels = SentinelPositions(text);
    std::size_t start = length / 3, end = 2 * length / 3;
    for (std::size_t p : sentinels) {
      if (p < end && start < p + 6) end = start;  // skip when crossing
    }
    if (start < end) existing.push_back({start, end, TagLabel::kOther, false, {}});
    const auto spans = LexiconTag(c.segmented_body, c.team, c.opponent,
                                  lexicon, existing);
    for (const auto& s : spans) {
      if (!existing.empty() && s == existing[0]) continue;
      for (const auto& e : existing) {
        EXPECT_TRUE(s.end <= e.start || s.start >= e.end);
      }
    }
  }
}

TEST(ReferentFormTest, Taxonomy) {
  const Lexicon& lexicon = BundledLexicon();
  const auto form = [&](const std::string& text, const std::string& surface,
                        bool implicit = false) {
    const std::u32string t = utf8::Decode(text);
    const std::size_t start = t.find(utf8::Decode(surface));
    const Span span{start, start + utf8::Length(surface), TagLabel::kIn,
                    implicit, {}};
    return ClassifyReferentForm(span, t, lexicon);
  };
  const std::string text =
      "[SENT] we and us and our o-line and Tua and Jets and they and Defense";
  EXPECT_EQ(form(text, "we"), ReferentForm::kTeamPlusSupporters);
  EXPECT_EQ(form(text, "us"), ReferentForm::kTeamPlusSupporters);
  EXPECT_EQ(form(text, "o-line"), ReferentForm::kSubset);
  EXPECT_EQ(form(text, "Defense"), ReferentForm::kSubset);
  EXPECT_EQ(form(text, "Tua"), ReferentForm::kPerson);
  EXPECT_EQ(form(text, "Jets"), ReferentForm::kTeam);
  EXPECT_EQ(form(text, "they"), ReferentForm::kTeam);
  EXPECT_EQ(form(text, "[SENT]", true), ReferentForm::kImplicit);
}

TEST(ReferentFormTest, NamesRoundTrip) {
  for (ReferentForm f :
       {ReferentForm::kPerson, ReferentForm::kSubset, ReferentForm::kTeam,
        ReferentForm::kTeamPlusSupporters, ReferentForm::kImplicit}) {
    EXPECT_EQ(ParseReferentForm(ReferentFormName(f)), f);
  }
  EXPECT_FALSE(ParseReferentForm("crowd").has_value());
}

TEST(LexiconTest, AliasesDisjointFromPronouns) {
  const Lexicon& lexicon = BundledLexicon();
  EXPECT_EQ(lexicon.teams().size(), 32u);
  for (const auto& [id, entry] : lexicon.teams()) {
    for (const auto& alias : entry.aliases) {
      const auto lowered = utf8::AsciiLower(utf8::Decode(alias));
      EXPECT_FALSE(lexicon.IsPronounIn(lowered)) << alias;
      EXPECT_FALSE(lexicon.IsPronounThird(lowered)) << alias;
    }
  }
  EXPECT_EQ(lexicon.FindTeam("chiefs"), "KC");
  EXPECT_EQ(lexicon.FindTeam("kc"), "KC");
  EXPECT_EQ(lexicon.DisplayName("NYJ"), "Jets");
}

TEST(LexiconTest, RejectsAliasThatIsAPronoun) {
  const nlohmann::json doc = {
      {"teams", {{"X", {{"name", "Xs"}, {"aliases", {"us"}}}}}},
      {"pronouns_in", {"we", "us"}},
      {"pronouns_third", {"they"}},
      {"subset_terms", nlohmann::json::array()}};
  EXPECT_THROW(Lexicon::FromJson(doc), Error);
}

}  // namespace
}  // namespace groupref
