#include "groupref/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "groupref/error.h"
#include "groupref/schema.h"
#include "groupref/utf8.h"
#include "text_io.h"

namespace groupref {
namespace {

using nlohmann::json;

bool IsAsciiSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::optional<std::string> OptionalString(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  return it->dump();
}

// Accepts integers, integral floats and digit strings.
std::optional<EpochSeconds> ParseTimestamp(const json& value) {
  EpochSeconds t = 0;
  if (value.is_number_integer()) {
    t = value.get<EpochSeconds>();
  } else if (value.is_number_float()) {
    const double d = value.get<double>();
    if (!std::isfinite(d) || d != std::floor(d)) return std::nullopt;
    t = static_cast<EpochSeconds>(d);
  } else if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), t);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  } else {
    return std::nullopt;
  }
  if (t <= 0) return std::nullopt;
  return t;
}

struct Ingestor {
  const ThreadMap& threads;
  IngestResult result;
  std::unordered_set<std::string> seen;

  void Reject(std::size_t line, std::string id, std::string reason,
              std::string detail) {
    result.rejects.push_back(
        {line, std::move(id), std::move(reason), std::move(detail)});
  }

  void Add(const json& record, std::size_t line) {
    if (!record.is_object()) {
      Reject(line, "", "malformed-json", "record is not an object");
      return;
    }
    auto id = OptionalString(record, "id");
    if (!id || id->empty()) {
      Reject(line, "", "missing-field", "id");
      return;
    }
    auto thread = OptionalString(record, "thread_id");
    if (!thread) {
      Reject(line, *id, "missing-field", "thread_id");
      return;
    }
    auto ts = record.find("created_utc");
    if (ts == record.end()) ts = record.find("created_at");
    if (ts == record.end() || ts->is_null()) {
      Reject(line, *id, "missing-field", "created_utc");
      return;
    }
    auto created = ParseTimestamp(*ts);
    if (!created) {
      Reject(line, *id, "bad-timestamp", ts->dump());
      return;
    }
    auto body = record.find("body");
    if (body == record.end() || !body->is_string()) {
      Reject(line, *id, "missing-field", "body");
      return;
    }
    const auto& text = body->get_ref<const std::string&>();
    if (utf8::Trim(text).empty()) {
      Reject(line, *id, "empty-body", "");
      return;
    }
    auto mapped = threads.find(*thread);
    if (mapped == threads.end()) {
      Reject(line, *id, "unknown-thread", *thread);
      return;
    }
    if (!seen.insert(*id).second) {
      Reject(line, *id, "duplicate-id", "");
      return;
    }
    RawComment c;
    c.id = *id;
    c.thread_id = *thread;
    c.team = mapped->second.team;
    c.game_id = mapped->second.game_id;
    c.created_at = *created;
    c.body = text;
    c.parent_id = OptionalString(record, "parent_id");
    c.parent_body = OptionalString(record, "parent_body");
    result.comments.push_back(std::move(c));
  }
};

}  // namespace

IngestResult IngestComments(std::istream& jsonl, const ThreadMap& threads) {
  Ingestor ingestor{threads, {}, {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(jsonl, line)) {
    ++line_no;
    if (utf8::Trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      ingestor.Reject(line_no, "", "malformed-json", e.what());
      continue;
    }
    ingestor.Add(record, line_no);
  }
  return std::move(ingestor.result);
}

IngestResult IngestCommentRecords(std::span<const json> records,
                                  const ThreadMap& threads) {
  Ingestor ingestor{threads, {}, {}};
  for (std::size_t i = 0; i < records.size(); ++i) {
    ingestor.Add(records[i], i + 1);
  }
  return std::move(ingestor.result);
}

ThreadMap ParseThreadMap(const json& doc) {
  if (!doc.is_object()) throw Error("bad-thread-map", "expected an object");
  ThreadMap map;
  for (const auto& [thread, info] : doc.items()) {
    if (!info.is_object() || !info.contains("team") ||
        !info.contains("game_id")) {
      throw Error("bad-thread-map", "entry " + thread + " needs team, game_id");
    }
    map[thread] = {info.at("team").get<std::string>(),
                   info.at("game_id").get<std::string>()};
  }
  return map;
}

ThreadMap LoadThreadMap(const std::filesystem::path& path) {
  return ParseThreadMap(internal::LoadJsonFile(path));
}

// ------------------------------------------------------------------- plays

PlayTable ParsePlaysCsv(std::istream& csv) {
  PlayTable table;
  std::string line;
  if (!std::getline(csv, line)) throw Error("bad-plays", "missing header");
  const auto header = internal::ParseCsvLine(line);
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (utf8::Trim(header[i]) == name) return i;
    }
    return std::nullopt;
  };
  const auto c_game = column("game_id");
  const auto c_index = column("play_index");
  const auto c_end = column("ended_at_utc");
  const auto c_wp = column("home_wp");
  const auto c_home = column("home_team");
  const auto c_away = column("away_team");
  if (!c_game || !c_index || !c_end || !c_wp) {
    throw Error("bad-plays",
                "header must contain game_id,play_index,ended_at_utc,home_wp");
  }
  std::size_t line_no = 1;
  while (std::getline(csv, line)) {
    ++line_no;
    if (utf8::Trim(line).empty()) continue;
    const auto fields = internal::ParseCsvLine(line);
    auto field = [&](std::size_t i) -> std::string {
      return i < fields.size() ? std::string(utf8::Trim(fields[i])) : "";
    };
    const std::string where = "line " + std::to_string(line_no);
    if (field(*c_wp).empty()) {
      table.warnings.push_back(where + ": empty home_wp, row skipped");
      continue;
    }
    Play play;
    play.game_id = field(*c_game);
    try {
      std::size_t pos = 0;
      const std::string idx = field(*c_index);
      play.play_index = std::stoi(idx, &pos);
      if (pos != idx.size()) throw std::invalid_argument(idx);
      const std::string end = field(*c_end);
      play.ended_at = std::stoll(end, &pos);
      if (pos != end.size()) throw std::invalid_argument(end);
      const std::string wp = field(*c_wp);
      play.home_wp = std::stod(wp, &pos);
      if (pos != wp.size()) throw std::invalid_argument(wp);
    } catch (const std::exception&) {
      throw Error("bad-plays", where + ": unparsable number");
    }
    if (!(play.home_wp >= 0.0 && play.home_wp <= 1.0)) {
      throw Error("bad-plays", where + ": home_wp outside [0,1]");
    }
    if (play.play_index < 1) {
      throw Error("bad-plays", where + ": play_index must be >= 1");
    }
    auto& game = table.games[play.game_id];
    game.game_id = play.game_id;
    if (c_home && !field(*c_home).empty()) game.home_team = field(*c_home);
    if (c_away && !field(*c_away).empty()) game.away_team = field(*c_away);
    game.plays.push_back(std::move(play));
  }
  for (auto& [id, game] : table.games) {
    std::sort(game.plays.begin(), game.plays.end(),
              [](const Play& a, const Play& b) {
                return a.play_index < b.play_index;
              });
    for (std::size_t i = 1; i < game.plays.size(); ++i) {
      if (game.plays[i].play_index == game.plays[i - 1].play_index) {
        throw Error("bad-plays", "game " + id + ": duplicate play_index " +
                                     std::to_string(game.plays[i].play_index));
      }
      if (game.plays[i].ended_at < game.plays[i - 1].ended_at) {
        throw Error("bad-plays", "game " + id + ": ended_at decreases at play " +
                                     std::to_string(game.plays[i].play_index));
      }
    }
  }
  return table;
}

PlayTable LoadPlaysCsv(const std::filesystem::path& path) {
  auto in = internal::OpenForRead(path);
  return ParsePlaysCsv(in);
}

void ApplyGameTeams(PlayTable& table, const json& games) {
  if (!games.is_object()) throw Error("bad-games", "expected an object");
  for (const auto& [id, info] : games.items()) {
    auto it = table.games.find(id);
    if (it == table.games.end()) continue;
    it->second.home_team = info.at("home_team").get<std::string>();
    it->second.away_team = info.at("away_team").get<std::string>();
  }
}

// ------------------------------------------------------------- game-time

std::string_view DropReasonName(DropReason reason) {
  switch (reason) {
    case DropReason::kPreGame:
      return "pre-game";
    case DropReason::kPostGame:
      return "post-game";
    case DropReason::kUrlOnly:
      return "url-only";
  }
  return "unknown";
}

bool IsUrlOnly(std::string_view body) {
  body = utf8::Trim(body);
  if (body.empty()) return false;
  std::size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && IsAsciiSpace(body[i])) ++i;
    std::size_t j = i;
    while (j < body.size() && !IsAsciiSpace(body[j])) ++j;
    const std::string token = utf8::AsciiLower(body.substr(i, j - i));
    const bool url = token.rfind("http://", 0) == 0 ||
                     token.rfind("https://", 0) == 0 ||
                     token.rfind("www.", 0) == 0;
    if (!url) return false;
    i = j;
  }
  return true;
}

FilterResult FilterGameTime(std::span<const RawComment> comments,
                            const GameRecord& game) {
  if (game.plays.empty()) {
    throw Error("alignment-impossible", "game " + game.game_id + " has no plays");
  }
  const EpochSeconds first = game.plays.front().ended_at;
  const EpochSeconds last = game.plays.back().ended_at;
  FilterResult result;
  for (const auto& c : comments) {
    if (c.created_at < first) {
      result.dropped.push_back({c, DropReason::kPreGame});
    } else if (c.created_at > last) {
      result.dropped.push_back({c, DropReason::kPostGame});
    } else if (IsUrlOnly(c.body)) {
      result.dropped.push_back({c, DropReason::kUrlOnly});
    } else {
      result.kept.push_back(c);
    }
  }
  return result;
}

// ------------------------------------------------------------ segmentation

std::vector<std::string> SplitSentences(std::string_view body,
                                        const SegmenterOptions& options) {
  body = utf8::Trim(body);
  if (body.empty()) throw Error("empty-text", "nothing to segment");
  auto is_terminal = [](char c) { return c == '.' || c == '!' || c == '?'; };
  auto starts_word = [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') ||
           (u >= '0' && u <= '9') || u >= 0xC0;
  };
  std::vector<std::string> sentences;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < body.size()) {
    if (!is_terminal(body[i])) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < body.size() && is_terminal(body[run_end])) ++run_end;
    std::size_t next = run_end;
    while (next < body.size() && IsAsciiSpace(body[next])) ++next;
    const bool boundary =
        next > run_end && next < body.size() && starts_word(body[next]);
    if (boundary && run_end - i == 1 && body[i] == '.') {
      std::size_t w = i;
      while (w > start && !IsAsciiSpace(body[w - 1])) --w;
      std::string word = utf8::AsciiLower(body.substr(w, i - w));
      while (!word.empty() && !starts_word(word.front())) word.erase(0, 1);
      if (!word.empty() &&
          std::find(options.abbreviations.begin(), options.abbreviations.end(),
                    word) != options.abbreviations.end()) {
        i = run_end;
        continue;
      }
    }
    if (boundary) {
      sentences.emplace_back(body.substr(start, run_end - start));
      start = next;
      i = next;
    } else {
      i = run_end;
    }
  }
  sentences.emplace_back(body.substr(start));
  return sentences;
}

std::string SegmentSentences(std::string_view body,
                             const SegmenterOptions& options) {
  std::string out;
  for (const auto& sentence : SplitSentences(body, options)) {
    if (!out.empty()) out += ' ';
    out += kSentinel;
    out += ' ';
    out += sentence;
  }
  return out;
}

std::string NormalizeWhitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (IsAsciiSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

std::string StripSentinels(std::string_view segmented) {
  std::string out;
  std::size_t pos = 0;
  while (pos < segmented.size()) {
    const auto hit = segmented.find(kSentinel, pos);
    if (hit == std::string_view::npos) {
      out += segmented.substr(pos);
      break;
    }
    out += segmented.substr(pos, hit - pos);
    out += ' ';
    pos = hit + kSentinel.size();
  }
  return NormalizeWhitespace(out);
}

// --------------------------------------------------------------- alignment

double AlignWinProbability(EpochSeconds t, const GameRecord& game, Side side) {
  if (game.plays.empty()) {
    throw Error("alignment-impossible", "game " + game.game_id + " has no plays");
  }
  if (t < game.plays.front().ended_at || t > game.plays.back().ended_at) {
    throw Error("outside-game-window",
                "t=" + std::to_string(t) + " outside game " + game.game_id);
  }
  auto it = std::upper_bound(
      game.plays.begin(), game.plays.end(), t,
      [](EpochSeconds value, const Play& p) { return value < p.ended_at; });
  const Play& play = it == game.plays.begin() ? game.plays.front() : *(it - 1);
  return side == Side::kHome ? play.home_wp : 1.0 - play.home_wp;
}

double AlignWinProbability(const RawComment& comment, const GameRecord& game,
                           Side side) {
  return AlignWinProbability(comment.created_at, game, side);
}

ParallelCorpus BuildParallelCorpus(std::span<const RawComment> home,
                                   std::span<const RawComment> away,
                                   const GameRecord& game,
                                   const SegmenterOptions& options) {
  if (game.home_team.empty() || game.away_team.empty() ||
      game.home_team == game.away_team) {
    throw Error("team-mismatch",
                "game " + game.game_id + " needs distinct home and away teams");
  }
  ParallelCorpus corpus;
  corpus.game_id = game.game_id;
  auto ground = [&](std::span<const RawComment> side_comments, Side side) {
    const TeamId& team = side == Side::kHome ? game.home_team : game.away_team;
    const TeamId& opponent =
        side == Side::kHome ? game.away_team : game.home_team;
    for (const auto& c : side_comments) {
      if (c.team != team) {
        throw Error("team-mismatch", "comment " + c.id + " has team " + c.team +
                                         ", expected " + team);
      }
      GroundedComment g;
      g.comment = c;
      g.comment.game_id = game.game_id;
      g.opponent = opponent;
      g.wp = AlignWinProbability(c, game, side);
      g.segmented_body = SegmentSentences(c.body, options);
      corpus.comments.push_back(std::move(g));
    }
  };
  ground(home, Side::kHome);
  ground(away, Side::kAway);
  if (home.empty()) {
    corpus.warnings.push_back("game " + game.game_id + ": no home comments");
  }
  if (away.empty()) {
    corpus.warnings.push_back("game " + game.game_id + ": no away comments");
  }
  std::sort(corpus.comments.begin(), corpus.comments.end(),
            [](const GroundedComment& a, const GroundedComment& b) {
              if (a.comment.created_at != b.comment.created_at) {
                return a.comment.created_at < b.comment.created_at;
              }
              return a.comment.id < b.comment.id;
            });
  return corpus;
}

// ---------------------------------------------------------------- file io

namespace {

json NullableString(const std::optional<std::string>& s) {
  return s ? json(*s) : json(nullptr);
}

internal::JsonLine RawFields(const RawComment& c) {
  internal::JsonLine line;
  line.Field("id", c.id)
      .Field("thread_id", c.thread_id)
      .Field("team", c.team)
      .Field("game_id", c.game_id)
      .Field("created_utc", c.created_at)
      .Field("body", c.body)
      .Field("parent_id", NullableString(c.parent_id))
      .Field("parent_body", NullableString(c.parent_body));
  return line;
}

template <typename T, typename Fn>
std::vector<T> ReadLines(std::istream& in, Fn&& fn) {
  std::vector<T> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (utf8::Trim(line).empty()) continue;
    try {
      out.push_back(fn(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error("bad-record",
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

json RawCommentToJson(const RawComment& c) {
  return json::parse(RawFields(c).Finish());
}

RawComment RawCommentFromJson(const json& j) {
  RawComment c;
  c.id = j.at("id").get<std::string>();
  c.thread_id = j.value("thread_id", "");
  c.team = j.value("team", "");
  c.game_id = j.value("game_id", "");
  c.created_at = j.at("created_utc").get<EpochSeconds>();
  c.body = j.at("body").get<std::string>();
  c.parent_id = OptionalString(j, "parent_id");
  c.parent_body = OptionalString(j, "parent_body");
  return c;
}

void WriteRawJsonl(std::ostream& out, std::span<const RawComment> comments) {
  for (const auto& c : comments) out << RawFields(c).Finish() << '\n';
}

std::vector<RawComment> ReadRawJsonl(std::istream& in) {
  return ReadLines<RawComment>(in, RawCommentFromJson);
}

std::string GroundedToJsonLine(const GroundedComment& g) {
  auto line = RawFields(g.comment);
  line.Field("opponent", g.opponent)
      .RawField("wp", internal::FormatDecimal(g.wp, 6))
      .Field("segmented_body", g.segmented_body);
  return line.Finish();
}

void WriteGroundedJsonl(std::ostream& out,
                        std::span<const GroundedComment> comments) {
  for (const auto& g : comments) out << GroundedToJsonLine(g) << '\n';
}

std::vector<GroundedComment> ReadGroundedJsonl(std::istream& in) {
  return ReadLines<GroundedComment>(in, [](const json& j) {
    GroundedComment g;
    g.comment = RawCommentFromJson(j);
    g.opponent = j.at("opponent").get<std::string>();
    g.wp = j.at("wp").get<double>();
    g.segmented_body = j.at("segmented_body").get<std::string>();
    return g;
  });
}

}  // namespace groupref
