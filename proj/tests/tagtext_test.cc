#include "groupref/tagtext.h"

#include <gtest/gtest.h>

#include <random>

#include "groupref/utf8.h"
#include "support/test_support.h"

namespace groupref {
namespace {

using testing::BundledFewShot;
using testing::PriorityMergeOracle;
using testing::RandomSpans;
using testing::RandomTaggedComment;

// Scalar-value offset of the n-th occurrence of `needle` in `text`.
std::size_t Offset(const std::string& text, const std::string& needle,
                   int nth = 0) {
  const std::u32string hay = utf8::Decode(text);
  const std::u32string n = utf8::Decode(needle);
  std::size_t pos = hay.find(n);
  while (nth-- > 0) pos = hay.find(n, pos + 1);
  EXPECT_NE(pos, std::u32string::npos) << needle;
  return pos;
}

Span At(const std::string& text, const std::string& surface, TagLabel label,
        int nth = 0) {
  const std::size_t start = Offset(text, surface, nth);
  return Span{start, start + utf8::Length(surface), label, false, {}};
}

const std::string kDefense =
    "[SENT] Defense getting absolutely bullied by a dude that looks like he "
    "sells solar panels .";

TEST(RenderTaggedTest, DefenseExample) {
  const TaggedComment tagged{"ex1",
                             kDefense,
                             {At(kDefense, "Defense", TagLabel::kIn),
                              At(kDefense, "a dude", TagLabel::kOut),
                              At(kDefense, "he", TagLabel::kOut)}};
  EXPECT_EQ(RenderTagged(tagged),
            "[SENT] [IN] getting absolutely bullied by [OUT] that looks like "
            "[OUT] sells solar panels .");
}

TEST(RenderTaggedTest, NoSpansReturnsCopy) {
  const TaggedComment tagged{"x", "[SENT] Need points but 7 would be HUGE", {}};
  EXPECT_EQ(RenderTagged(tagged), tagged.text);
}

TEST(RenderTaggedTest, ImplicitSpanReplacesSentinel) {
  const TaggedComment tagged{"x",
                             "[SENT] Need points",
                             {Span{0, 6, TagLabel::kIn, true, {}}}};
  EXPECT_EQ(RenderTagged(tagged), "[IN] Need points");
}

TEST(RenderTaggedTest, OverlapIsAnError) {
  const TaggedComment tagged{"x",
                             "[SENT] abcdef",
                             {Span{7, 10, TagLabel::kIn, false, {}},
                              Span{9, 12, TagLabel::kOut, false, {}}}};
  try {
    RenderTagged(tagged);
    FAIL() << "expected overlap";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "overlap");
  }
}

TEST(ParseTaggedTest, DefenseExampleRecoversThreeSpans) {
  const std::string tagged =
      "[SENT] [IN] getting absolutely bullied by [OUT] that looks like [OUT] "
      "sells solar panels .";
  const ParseResult result = ParseTagged(tagged, kDefense);
  ASSERT_EQ(result.spans.size(), 3u);
  const std::string surfaces[] = {"Defense", "a dude", "he"};
  const TagLabel labels[] = {TagLabel::kIn, TagLabel::kOut, TagLabel::kOut};
  const std::u32string text = utf8::Decode(kDefense);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(SpanSurface(text, result.spans[i]), surfaces[i]);
    EXPECT_EQ(result.spans[i].label, labels[i]);
    EXPECT_FALSE(result.spans[i].implicit);
  }
  EXPECT_FALSE(result.report.whitespace_normalized);
}

TEST(ParseTaggedTest, IdenticalTextHasNoSpans) {
  EXPECT_TRUE(ParseTagged(kDefense, kDefense).spans.empty());
}

TEST(ParseTaggedTest, DegenerateTagsFailWithOffset) {
  try {
    ParseTagged("[IN] [IN] [IN]", "hello world");
    FAIL() << "expected alignment-failed";
  } catch (const AlignmentError& e) {
    EXPECT_EQ(e.code(), "alignment-failed");
    EXPECT_LE(e.offset(), 11u);
  }
}

TEST(ParseTaggedTest, HallucinatedTextFails) {
  EXPECT_THROW(ParseTagged("[SENT] [IN] played great", "[SENT] we played well"),
               AlignmentError);
}

TEST(ParseTaggedTest, LowerCaseTagsAccepted) {
  const ParseResult r = ParseTagged("[SENT] How are [in] this bad",
                                    "[SENT] How are we this bad");
  ASSERT_EQ(r.spans.size(), 1u);
  EXPECT_EQ(r.spans[0].start, 15u);
  EXPECT_EQ(r.spans[0].end, 17u);
}

TEST(ParseTaggedTest, ImplicitSpanAtSentinel) {
  const ParseResult r = ParseTagged("[IN] Need points but 7 would be HUGE",
                                    "[SENT] Need points but 7 would be HUGE");
  ASSERT_EQ(r.spans.size(), 1u);
  EXPECT_TRUE(r.spans[0].implicit);
  EXPECT_EQ(r.spans[0].start, 0u);
  EXPECT_EQ(r.spans[0].end, 6u);
}

TEST(ParseTaggedTest, WhitespaceTolerance) {
  const std::string original = "[SENT] Suck it, KC!";
  const ParseResult r = ParseTagged("[SENT]  Suck it ,  [OUT] !", original);
  ASSERT_EQ(r.spans.size(), 1u);
  EXPECT_EQ(SpanSurface(utf8::Decode(original), r.spans[0]), "KC");
  EXPECT_TRUE(r.report.whitespace_normalized);
}

TEST(ParseTaggedTest, AmbiguityResolvesLeftmostAndIsFlagged) {
  // The first tag may cover one or two words; both placements reproduce the
  // text, so the leftmost-shortest one wins.
  const std::string original = "[SENT] go go go go";
  const ParseResult r = ParseTagged("[SENT] [IN] go [OUT]", original);
  ASSERT_EQ(r.spans.size(), 2u);
  EXPECT_EQ(r.spans[0].start, 7u);
  EXPECT_EQ(r.spans[0].end, 9u);
  EXPECT_TRUE(r.report.ambiguous);
}

TEST(RoundTripTest, FewShotFixturesByteExact) {
  const FewShotSet set = BundledFewShot();
  std::vector<FewShotExample> all = set.examples;
  ASSERT_TRUE(set.no_reference.has_value());
  all.push_back(*set.no_reference);
  ASSERT_EQ(all.size(), 7u);
  for (const auto& ex : all) {
    const ParseResult parsed = ParseTagged(ex.target, ex.comment);
    const TaggedComment tc{"fx", ex.comment, parsed.spans};
    EXPECT_EQ(RenderTagged(tc), ex.target);
    EXPECT_EQ(ParseTagged(RenderTagged(tc), ex.comment).spans, parsed.spans);
    EXPECT_FALSE(parsed.report.whitespace_normalized) << ex.comment;
  }
}

TEST(RoundTripTest, RandomComments) {
  std::mt19937_64 rng(2024);
  for (std::size_t i = 0; i < 1000; ++i) {
    const TaggedComment tc = RandomTaggedComment(rng, i);
    ASSERT_FALSE(CheckSpans(utf8::Decode(tc.text), tc.spans).has_value());
    const std::string rendered = RenderTagged(tc);
    const ParseResult parsed = ParseTagged(rendered, tc.text);
    ASSERT_EQ(parsed.spans, tc.spans) << tc.text << "\n" << rendered;
  }
}

TEST(RenderTaggedTest, PreservesTextOutsideSpans) {
  std::mt19937_64 rng(5);
  for (std::size_t i = 0; i < 200; ++i) {
    const TaggedComment tc = RandomTaggedComment(rng, i);
    const std::u32string text = utf8::Decode(tc.text);
    const std::u32string rendered = utf8::Decode(RenderTagged(tc));
    // Rebuild by substituting tokens and compare against the rendering.
    std::u32string rebuilt;
    std::size_t cursor = 0;
    for (const auto& s : tc.spans) {
      rebuilt += text.substr(cursor, s.start - cursor);
      rebuilt += utf8::Decode(LabelToken(s.label));
      cursor = s.end;
    }
    rebuilt += text.substr(cursor);
    EXPECT_EQ(rendered, rebuilt);
  }
}

TEST(CheckSpansTest, DetectsViolations) {
  const std::u32string text = U"[SENT] abc def";
  const auto check = [&](std::vector<Span> spans) {
    return CheckSpans(text, spans).has_value();
  };
  EXPECT_FALSE(check({{7, 10, TagLabel::kIn, false, {}}}));
  EXPECT_TRUE(check({{7, 7, TagLabel::kIn, false, {}}}));
  EXPECT_TRUE(check({{7, 15, TagLabel::kIn, false, {}}}));
  EXPECT_TRUE(check({{11, 14, TagLabel::kIn, false, {}},
                     {7, 10, TagLabel::kIn, false, {}}}));
  EXPECT_TRUE(check({{0, 6, TagLabel::kIn, false, {}}}));
  EXPECT_TRUE(check({{7, 10, TagLabel::kIn, true, {}}}));
  EXPECT_TRUE(check({{5, 9, TagLabel::kIn, false, {}}}));
  EXPECT_TRUE(check({{7, 10, TagLabel::kIn, false, 6}}));
  EXPECT_FALSE(check({{0, 6, TagLabel::kIn, true, 1}}));
}

TEST(MergeTagsTest, DisjointListsConcatenateSorted) {
  const std::vector<Span> model = {{10, 12, TagLabel::kIn, false, {}}};
  const std::vector<Span> lexicon = {{2, 4, TagLabel::kOut, false, {}},
                                     {20, 22, TagLabel::kOther, false, {}}};
  const auto merged = MergeTags(model, lexicon);
  ASSERT_EQ(merged.size(), 3u);
  EXPECT_EQ(merged[0].start, 2u);
  EXPECT_EQ(merged[1].start, 10u);
  EXPECT_EQ(merged[2].start, 20u);
}

TEST(MergeTagsTest, ModelWinsOnContainment) {
  const std::vector<Span> model = {{5, 15, TagLabel::kOut, false, {}}};
  const std::vector<Span> lexicon = {{8, 10, TagLabel::kIn, false, {}}};
  EXPECT_EQ(MergeTags(model, lexicon), model);
}

TEST(MergeTagsTest, FiveSpanFixtureMatchesOracle) {
  const std::vector<Span> model = {{0, 6, TagLabel::kIn, false, {}},
                                   {20, 25, TagLabel::kOut, false, {}}};
  const std::vector<Span> lexicon = {{4, 9, TagLabel::kOut, false, {}},
                                     {12, 15, TagLabel::kOther, false, {}},
                                     {24, 28, TagLabel::kIn, false, {}}};
  const auto merged = MergeTags(model, lexicon);
  EXPECT_EQ(merged, PriorityMergeOracle(40, model, lexicon));
  EXPECT_EQ(merged.size(), 3u);
}

TEST(MergeTagsTest, RandomListsMatchOracle) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 500; ++i) {
    const auto model = RandomSpans(rng, 60, 4);
    const auto lexicon = RandomSpans(rng, 60, 6);
    const auto merged = MergeTags(model, lexicon);
    EXPECT_EQ(merged, PriorityMergeOracle(60, model, lexicon));
    EXPECT_FALSE(CheckSpans(std::u32string(60, U'x'), merged).has_value());
  }
}

}  // namespace
}  // namespace groupref
