#ifndef GROUPREF_CORPUS_H_
#define GROUPREF_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace groupref {

using TeamId = std::string;
using EpochSeconds = std::int64_t;

enum class Side { kHome, kAway };

// A forum comment from a game thread. `team` is the thread's team, i.e. the
// commenter's in-group.
struct RawComment {
  std::string id;
  std::string thread_id;
  TeamId team;
  std::string game_id;
  EpochSeconds created_at = 0;
  std::string body;
  std::optional<std::string> parent_id;
  std::optional<std::string> parent_body;

  bool operator==(const RawComment&) const = default;
};

struct ThreadInfo {
  TeamId team;
  std::string game_id;
};
using ThreadMap = std::map<std::string, ThreadInfo>;

struct Play {
  std::string game_id;
  int play_index = 0;
  EpochSeconds ended_at = 0;
  double home_wp = 0.0;
};

struct GameRecord {
  std::string game_id;
  TeamId home_team;
  TeamId away_team;
  std::vector<Play> plays;  // ordered by play_index
};

struct GroundedComment {
  RawComment comment;
  TeamId opponent;
  double wp = 0.0;  // in-group win probability in [0,1]
  std::string segmented_body;
};

// ---------------------------------------------------------------- ingestion

struct RejectedRecord {
  std::size_t line = 0;  // 1-based line in the input stream, 0 if unknown
  std::string id;        // empty when the record had no usable id
  std::string reason;    // unknown-thread, bad-timestamp, missing-field, ...
  std::string detail;
};

struct IngestResult {
  std::vector<RawComment> comments;
  std::vector<RejectedRecord> rejects;
};

// Reads JSON-lines comment records. Invalid records never abort ingestion;
// they land in `rejects` with a reason code.
IngestResult IngestComments(std::istream& jsonl, const ThreadMap& threads);
IngestResult IngestCommentRecords(std::span<const nlohmann::json> records,
                                  const ThreadMap& threads);

ThreadMap ParseThreadMap(const nlohmann::json& doc);
ThreadMap LoadThreadMap(const std::filesystem::path& path);

// ------------------------------------------------------------------- plays

struct PlayTable {
  std::map<std::string, GameRecord> games;
  std::vector<std::string> warnings;
};

// CSV with header game_id,play_index,ended_at_utc,home_wp. Optional
// home_team/away_team columns fill in the teams. Rows with an empty home_wp
// are skipped with a warning. Throws Error("bad-plays") on invariant
// violations (duplicate play_index, decreasing ended_at, wp outside [0,1]).
PlayTable ParsePlaysCsv(std::istream& csv);
PlayTable LoadPlaysCsv(const std::filesystem::path& path);

// Games file: {game_id: {"home_team": .., "away_team": ..}}.
void ApplyGameTeams(PlayTable& table, const nlohmann::json& games);

// ------------------------------------------------------------- game-time

enum class DropReason { kPreGame, kPostGame, kUrlOnly };
std::string_view DropReasonName(DropReason reason);

struct DroppedComment {
  RawComment comment;
  DropReason reason;
};

struct FilterResult {
  std::vector<RawComment> kept;
  std::vector<DroppedComment> dropped;
};

// One or more whitespace-separated tokens, each starting with http://,
// https:// or www., and nothing else.
bool IsUrlOnly(std::string_view body);

// Keeps comments posted within [first play end, last play end] whose body is
// not URL-only. Throws Error("alignment-impossible") on an empty play list.
FilterResult FilterGameTime(std::span<const RawComment> comments,
                            const GameRecord& game);

// ------------------------------------------------------------ segmentation

struct SegmenterOptions {
  // Lower-case words that do not end a sentence when followed by a period.
  std::vector<std::string> abbreviations = {"mr", "mrs", "ms", "dr", "jr",
                                            "sr", "st", "vs", "etc", "e.g",
                                            "i.e", "no", "u.s", "approx"};
};

// Rule-based split: a run of . ! ? followed by whitespace and a letter or
// digit ends a sentence, unless the run is a single period closing a known
// abbreviation. Throws Error("empty-text") for whitespace-only input.
std::vector<std::string> SplitSentences(std::string_view body,
                                        const SegmenterOptions& options = {});

// "[SENT] first sentence [SENT] second sentence".
std::string SegmentSentences(std::string_view body,
                             const SegmenterOptions& options = {});

// Inverse of SegmentSentences modulo whitespace: drops sentinels and
// collapses whitespace runs to one space.
std::string StripSentinels(std::string_view segmented);
std::string NormalizeWhitespace(std::string_view text);

// --------------------------------------------------------------- alignment

// In-group WP at time `t`: home_wp of the latest play ending at or before t
// (ties go to the play ending at t), complemented for the away side. A
// comment before any play has ended takes the first play's value. Throws
// Error("outside-game-window") outside [first end, last end].
double AlignWinProbability(EpochSeconds t, const GameRecord& game, Side side);
double AlignWinProbability(const RawComment& comment, const GameRecord& game,
                           Side side);

struct ParallelCorpus {
  std::string game_id;
  std::vector<GroundedComment> comments;  // sorted by created_at, then id
  std::vector<std::string> warnings;
};

// Grounds already-filtered home and away comments. Throws
// Error("team-mismatch") when a comment's team is not the expected side.
ParallelCorpus BuildParallelCorpus(std::span<const RawComment> home,
                                   std::span<const RawComment> away,
                                   const GameRecord& game,
                                   const SegmenterOptions& options = {});

// ---------------------------------------------------------------- file io

nlohmann::json RawCommentToJson(const RawComment& comment);
RawComment RawCommentFromJson(const nlohmann::json& j);

// JSON-lines writers; wp is written with at least six fractional digits.
void WriteRawJsonl(std::ostream& out, std::span<const RawComment> comments);
std::vector<RawComment> ReadRawJsonl(std::istream& in);
std::string GroundedToJsonLine(const GroundedComment& comment);
void WriteGroundedJsonl(std::ostream& out,
                        std::span<const GroundedComment> comments);
std::vector<GroundedComment> ReadGroundedJsonl(std::istream& in);

}  // namespace groupref

#endif  // GROUPREF_CORPUS_H_
