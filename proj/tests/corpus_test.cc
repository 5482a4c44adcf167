#include "groupref/corpus.h"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "groupref/error.h"
#include "support/test_support.h"

namespace groupref {
namespace {

using testing::LinearScanWp;
using testing::ThreePlayGame;

ThreadMap Threads() {
  return {{"t_home", {"NYJ", "G"}}, {"t_away", {"CHI", "G"}}};
}

RawComment Comment(std::string id, std::string team, EpochSeconds t,
                   std::string body = "Nice play") {
  RawComment c;
  c.id = std::move(id);
  c.thread_id = team == "NYJ" ? "t_home" : "t_away";
  c.team = std::move(team);
  c.game_id = "G";
  c.created_at = t;
  c.body = std::move(body);
  return c;
}

// ---------------------------------------------------------------- ingest

TEST(IngestTest, WellFormedRecord) {
  std::istringstream in(
      R"({"id":"c1","thread_id":"t_home","created_utc":150,"body":"Go Jets",)"
      R"("parent_id":null,"parent_body":null})"
      "\n");
  const IngestResult result = IngestComments(in, Threads());
  ASSERT_EQ(result.comments.size(), 1u);
  EXPECT_TRUE(result.rejects.empty());
  const RawComment& c = result.comments[0];
  EXPECT_EQ(c.id, "c1");
  EXPECT_EQ(c.team, "NYJ");
  EXPECT_EQ(c.game_id, "G");
  EXPECT_EQ(c.created_at, 150);
  EXPECT_EQ(c.body, "Go Jets");
  EXPECT_FALSE(c.parent_id.has_value());
}

TEST(IngestTest, MalformedTimestampIsRejected) {
  std::istringstream in(
      R"({"id":"c1","thread_id":"t_home","created_utc":"abc","body":"x"})"
      "\n");
  const IngestResult result = IngestComments(in, Threads());
  EXPECT_TRUE(result.comments.empty());
  ASSERT_EQ(result.rejects.size(), 1u);
  EXPECT_EQ(result.rejects[0].reason, "bad-timestamp");
  EXPECT_EQ(result.rejects[0].line, 1u);
}

TEST(IngestTest, UnmappedThreadAmongThree) {
  std::istringstream in(
      R"({"id":"a","thread_id":"t_home","created_utc":1,"body":"x"})"
      "\n"
      R"({"id":"b","thread_id":"t_nowhere","created_utc":2,"body":"y"})"
      "\n"
      R"({"id":"c","thread_id":"t_away","created_utc":3,"body":"z"})"
      "\n");
  const IngestResult result = IngestComments(in, Threads());
  EXPECT_EQ(result.comments.size(), 2u);
  ASSERT_EQ(result.rejects.size(), 1u);
  EXPECT_EQ(result.rejects[0].id, "b");
  EXPECT_EQ(result.rejects[0].reason, "unknown-thread");
}

TEST(IngestTest, OtherInvalidRecordsNeverAbort) {
  std::istringstream in(
      "not json\n"
      R"({"thread_id":"t_home","created_utc":1,"body":"x"})"
      "\n"
      R"({"id":"e","thread_id":"t_home","created_utc":1,"body":"   "})"
      "\n"
      R"({"id":"d","thread_id":"t_home","created_utc":1,"body":"x"})"
      "\n"
      R"({"id":"d","thread_id":"t_home","created_utc":2,"body":"y"})"
      "\n"
      R"({"id":"z","thread_id":"t_home","created_utc":-5,"body":"y"})"
      "\n");
  const IngestResult result = IngestComments(in, Threads());
  ASSERT_EQ(result.comments.size(), 1u);
  EXPECT_EQ(result.comments[0].id, "d");
  std::vector<std::string> reasons;
  for (const auto& r : result.rejects) reasons.push_back(r.reason);
  EXPECT_EQ(reasons,
            (std::vector<std::string>{"malformed-json", "missing-field",
                                      "empty-body", "duplicate-id",
                                      "bad-timestamp"}));
}

// ----------------------------------------------------------------- plays

TEST(PlaysTest, ParsesAndSkipsEmptyWp) {
  std::istringstream csv(
      "game_id,play_index,ended_at_utc,home_wp\n"
      "G,1,100,0.55\n"
      "G,2,160,\n"
      "G,3,220,0.40\n");
  const PlayTable table = ParsePlaysCsv(csv);
  ASSERT_EQ(table.games.size(), 1u);
  const auto& plays = table.games.at("G").plays;
  ASSERT_EQ(plays.size(), 2u);
  EXPECT_EQ(plays[1].play_index, 3);
  EXPECT_DOUBLE_EQ(plays[1].home_wp, 0.40);
  EXPECT_EQ(table.warnings.size(), 1u);
}

TEST(PlaysTest, RejectsInvariantViolations) {
  const auto parse = [](const std::string& rows) {
    std::istringstream csv("game_id,play_index,ended_at_utc,home_wp\n" + rows);
    return ParsePlaysCsv(csv);
  };
  EXPECT_THROW(parse("G,1,100,1.5\n"), Error);
  EXPECT_THROW(parse("G,1,100,0.5\nG,1,120,0.5\n"), Error);
  EXPECT_THROW(parse("G,1,100,0.5\nG,2,90,0.5\n"), Error);
  EXPECT_THROW(parse("G,0,100,0.5\n"), Error);
}

// -------------------------------------------------------------- game time

TEST(FilterGameTimeTest, KeepsInsideAndDropsWithReasons) {
  const GameRecord game = ThreePlayGame();
  const std::vector<RawComment> input = {
      Comment("inside", "NYJ", 150),
      Comment("first", "NYJ", 100),
      Comment("last", "NYJ", 220),
      Comment("url", "NYJ", 150, "  https://example.com/x "),
      Comment("late", "NYJ", 221),
      Comment("early", "CHI", 99),
  };
  const FilterResult result = FilterGameTime(input, game);
  std::vector<std::string> kept;
  for (const auto& c : result.kept) kept.push_back(c.id);
  EXPECT_EQ(kept, (std::vector<std::string>{"inside", "first", "last"}));
  ASSERT_EQ(result.dropped.size(), 3u);
  EXPECT_EQ(DropReasonName(result.dropped[0].reason), "url-only");
  EXPECT_EQ(DropReasonName(result.dropped[1].reason), "post-game");
  EXPECT_EQ(result.dropped[1].comment.id, "late");
  EXPECT_EQ(DropReasonName(result.dropped[2].reason), "pre-game");
  EXPECT_EQ(result.kept.size() + result.dropped.size(), input.size());
}

TEST(FilterGameTimeTest, EmptyPlayListIsAnError) {
  GameRecord game = ThreePlayGame();
  game.plays.clear();
  const std::vector<RawComment> input = {Comment("a", "NYJ", 1)};
  try {
    FilterGameTime(input, game);
    FAIL() << "expected alignment-impossible";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "alignment-impossible");
  }
}

TEST(FilterGameTimeTest, UrlOnlyPattern) {
  EXPECT_TRUE(IsUrlOnly("https://example.com/x"));
  EXPECT_TRUE(IsUrlOnly(" http://a.b  www.c.d "));
  EXPECT_FALSE(IsUrlOnly("look https://example.com"));
  EXPECT_FALSE(IsUrlOnly("   "));
}

// ----------------------------------------------------------- segmentation

TEST(SegmentTest, TwoSentences) {
  EXPECT_EQ(SegmentSentences("Hasn't really been him . Receivers have been "
                             "missing a lot of easy catches."),
            "[SENT] Hasn't really been him . [SENT] Receivers have been "
            "missing a lot of easy catches.");
}

TEST(SegmentTest, SingleSentenceCases) {
  EXPECT_EQ(SegmentSentences("Fair enough !"), "[SENT] Fair enough !");
  EXPECT_EQ(SegmentSentences("WHAT A THROW"), "[SENT] WHAT A THROW");
  EXPECT_EQ(SegmentSentences("Mr. Irsay is here"), "[SENT] Mr. Irsay is here");
}

TEST(SegmentTest, RepeatedPunctuationAndDigits) {
  EXPECT_EQ(SplitSentences("Wow!!! 7 points?! ok").size(), 3u);
  EXPECT_EQ(SplitSentences("Score is 3.5 now").size(), 1u);
}

TEST(SegmentTest, WhitespaceOnlyIsAnError) {
  try {
    SegmentSentences(" \t\n");
    FAIL() << "expected empty-text";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "empty-text");
  }
}

TEST(SegmentTest, StrippingSentinelsRestoresTrimmedBody) {
  const std::string bodies[] = {
      "  Hasn't really been him .   Receivers have been missing!  ",
      "One. Two? Three!",
      "no punctuation at all",
      "Line one.\nLine two."};
  for (const auto& body : bodies) {
    const std::string segmented = SegmentSentences(body);
    EXPECT_EQ(StripSentinels(segmented), NormalizeWhitespace(body)) << body;
  }
}

// -------------------------------------------------------------- alignment

TEST(AlignTest, LatestCompletedPlayAndComplement) {
  const GameRecord game = ThreePlayGame();
  EXPECT_DOUBLE_EQ(AlignWinProbability(165, game, Side::kHome), 0.60);
  EXPECT_DOUBLE_EQ(AlignWinProbability(165, game, Side::kAway), 0.40);
  EXPECT_DOUBLE_EQ(AlignWinProbability(100, game, Side::kHome), 0.55);
  EXPECT_DOUBLE_EQ(AlignWinProbability(160, game, Side::kHome), 0.60);
  EXPECT_DOUBLE_EQ(AlignWinProbability(220, game, Side::kHome), 0.40);
}

TEST(AlignTest, OutsideWindowIsAnError) {
  const GameRecord game = ThreePlayGame();
  EXPECT_THROW(AlignWinProbability(99, game, Side::kHome), Error);
  EXPECT_THROW(AlignWinProbability(221, game, Side::kAway), Error);
}

TEST(AlignTest, ComplementsSumToOneAndMatchLinearScan) {
  const GameRecord game = ThreePlayGame();
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<EpochSeconds> t(100, 220);
  for (int i = 0; i < 100; ++i) {
    const EpochSeconds ts = t(rng);
    const double home = AlignWinProbability(ts, game, Side::kHome);
    const double away = AlignWinProbability(ts, game, Side::kAway);
    EXPECT_EQ(home + away, 1.0) << ts;
    EXPECT_EQ(home, LinearScanWp(game, ts, Side::kHome)) << ts;
  }
}

TEST(AlignTest, PiecewiseConstantBetweenPlayEnds) {
  const GameRecord game = ThreePlayGame();
  for (EpochSeconds t = 100; t < 160; ++t) {
    EXPECT_EQ(AlignWinProbability(t, game, Side::kHome), 0.55);
  }
  for (EpochSeconds t = 160; t < 220; ++t) {
    EXPECT_EQ(AlignWinProbability(t, game, Side::kHome), 0.60);
  }
}

// ---------------------------------------------------------- parallel corpus

TEST(ParallelCorpusTest, ComplementaryWpAtEqualTimestamps) {
  const GameRecord game = ThreePlayGame();
  const std::vector<RawComment> home = {Comment("h", "NYJ", 170)};
  const std::vector<RawComment> away = {Comment("a", "CHI", 170)};
  const ParallelCorpus corpus = BuildParallelCorpus(home, away, game);
  ASSERT_EQ(corpus.comments.size(), 2u);
  EXPECT_EQ(corpus.game_id, "G");
  EXPECT_EQ(corpus.comments[0].comment.id, "a");  // tie broken by id
  EXPECT_EQ(corpus.comments[0].opponent, "NYJ");
  EXPECT_EQ(corpus.comments[1].opponent, "CHI");
  EXPECT_EQ(corpus.comments[0].wp + corpus.comments[1].wp, 1.0);
  EXPECT_EQ(corpus.comments[1].segmented_body, "[SENT] Nice play");
}

TEST(ParallelCorpusTest, EmptyAwaySideWarns) {
  const GameRecord game = ThreePlayGame();
  const std::vector<RawComment> home = {Comment("h", "NYJ", 170)};
  const ParallelCorpus corpus = BuildParallelCorpus(home, {}, game);
  EXPECT_EQ(corpus.comments.size(), 1u);
  EXPECT_FALSE(corpus.warnings.empty());
}

TEST(ParallelCorpusTest, TeamMismatch) {
  const GameRecord game = ThreePlayGame();
  const std::vector<RawComment> home = {Comment("h", "CHI", 170)};
  try {
    BuildParallelCorpus(home, {}, game);
    FAIL() << "expected team-mismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "team-mismatch");
  }
}

TEST(ParallelCorpusTest, TenCommentsMatchLinearScanAndSort) {
  const GameRecord game = ThreePlayGame();
  std::vector<RawComment> home, away;
  const EpochSeconds times[] = {219, 100, 161, 159, 220,
                                130, 160, 100, 200, 185};
  for (int i = 0; i < 10; ++i) {
    const bool is_home = i % 2 == 0;
    (is_home ? home : away)
        .push_back(Comment("c" + std::to_string(i), is_home ? "NYJ" : "CHI",
                           times[i], "Play " + std::to_string(i) + "."));
  }
  const ParallelCorpus corpus = BuildParallelCorpus(home, away, game);
  ASSERT_EQ(corpus.comments.size(), 10u);
  for (std::size_t i = 0; i < corpus.comments.size(); ++i) {
    const GroundedComment& g = corpus.comments[i];
    const Side side = g.comment.team == "NYJ" ? Side::kHome : Side::kAway;
    EXPECT_EQ(g.wp, LinearScanWp(game, g.comment.created_at, side));
    if (i > 0) {
      EXPECT_LE(corpus.comments[i - 1].comment.created_at,
                g.comment.created_at);
    }
  }
}

TEST(GroundedIoTest, RoundTripsWithSixDigitWp) {
  const GameRecord game = ThreePlayGame();
  std::vector<RawComment> home = {Comment("h", "NYJ", 170, "Go. Go!")};
  home[0].parent_id = "p";
  home[0].parent_body = "parent text";
  const ParallelCorpus corpus = BuildParallelCorpus(home, {}, game);
  std::ostringstream out;
  WriteGroundedJsonl(out, corpus.comments);
  EXPECT_NE(out.str().find("\"wp\":0.600000"), std::string::npos) << out.str();
  std::istringstream in(out.str());
  const auto back = ReadGroundedJsonl(in);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].comment, corpus.comments[0].comment);
  EXPECT_EQ(back[0].wp, corpus.comments[0].wp);
  EXPECT_EQ(back[0].segmented_body, corpus.comments[0].segmented_body);
}

}  // namespace
}  // namespace groupref
