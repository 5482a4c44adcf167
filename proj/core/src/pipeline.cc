#include "groupref/pipeline.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "groupref/analysis.h"
#include "groupref/interchange.h"
#include "groupref/lexicon.h"
#include "groupref/report.h"
#include "groupref/scoring.h"
#include "groupref/tag_batch.h"
#include "groupref/utf8.h"
#include "text_io.h"

namespace groupref {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view StageName(Stage stage) {
  switch (stage) {
    case Stage::kIngest:
      return "ingest";
    case Stage::kAlign:
      return "align";
    case Stage::kTag:
      return "tag";
    case Stage::kScore:
      return "score";
    case Stage::kAnalyze:
      return "analyze";
  }
  return "";
}

Stage ParseStage(std::string_view name) {
  for (Stage s : kAllStages) {
    if (StageName(s) == name) return s;
  }
  throw Error("bad-stage", "unknown stage '" + std::string(name) + "'");
}

std::uint64_t Fingerprint(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ULL ^ seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::string ReadAll(const fs::path& path) {
  auto in = internal::OpenForRead(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteAll(const fs::path& path, const std::string& body) {
  auto out = internal::OpenForWrite(path);
  out << body;
  out.flush();
  if (!out) throw Error("io", "failed writing " + path.string());
}

std::string Hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

// Accumulates stage inputs into a fingerprint.
class Digest {
 public:
  Digest& Add(std::string_view tag, std::string_view value) {
    h_ = Fingerprint(value, Fingerprint(tag, h_));
    return *this;
  }
  Digest& File(std::string_view tag, const fs::path& path) {
    return Add(tag, ReadAll(path));
  }
  std::string hex() const { return Hex(h_); }

 private:
  std::uint64_t h_ = 0;
};

class Runner {
 public:
  Runner(const RunConfig& config, const PipelineOptions& options)
      : config_(config), options_(options), out_(config.paths.out) {}

  StageOutcome Run(Stage stage) {
    outcome_ = StageOutcome{stage, false, {}};
    switch (stage) {
      case Stage::kIngest:
        Ingest();
        break;
      case Stage::kAlign:
        Align();
        break;
      case Stage::kTag:
        Tag();
        break;
      case Stage::kScore:
        Score();
        break;
      case Stage::kAnalyze:
        Analyze();
        break;
    }
    return outcome_;
  }

 private:
  fs::path Artifact(const char* name) const { return out_ / name; }

  // Throws unless `name` exists, naming the stage that produces it.
  fs::path Upstream(const char* name, Stage producer) const {
    const fs::path p = Artifact(name);
    if (!fs::exists(p)) {
      throw Error("missing-artifact",
                  p.string() + " not found; run " +
                      std::string(StageName(producer)) + " first");
    }
    return p;
  }

  fs::path StampPath(Stage stage) const {
    return out_ / artifacts::kStampDir /
           (std::string(StageName(stage)) + ".json");
  }

  // True (and marks the outcome skipped) when the stage's stamp matches
  // `fingerprint` and every output exists.
  bool UpToDate(const std::string& fingerprint,
                std::initializer_list<fs::path> outputs) {
    if (options_.force) return false;
    const fs::path stamp = StampPath(outcome_.stage);
    if (!fs::exists(stamp)) return false;
    for (const auto& o : outputs) {
      if (!fs::exists(o)) return false;
    }
    try {
      const json j = internal::LoadJsonFile(stamp);
      if (j.value("fingerprint", std::string()) != fingerprint) return false;
    } catch (const Error&) {
      return false;
    }
    outcome_.skipped = true;
    Log("up to date, skipped");
    return true;
  }

  void Stamp(const std::string& fingerprint) {
    WriteAll(StampPath(outcome_.stage),
             json{{"stage", StageName(outcome_.stage)},
                  {"fingerprint", fingerprint}}
                     .dump() +
                 "\n");
  }

  void Log(std::string message) {
    if (options_.log) {
      options_.log(std::string(StageName(outcome_.stage)) + ": " + message);
    }
    outcome_.messages.push_back(std::move(message));
  }

  void Ingest() {
    const std::string fp = Digest()
                               .Add("stage", "ingest")
                               .File("comments", config_.paths.comments)
                               .File("threads", config_.paths.threads)
                               .hex();
    const fs::path raw = Artifact(artifacts::kRawComments);
    const fs::path rejects = Artifact(artifacts::kIngestRejects);
    if (UpToDate(fp, {raw, rejects})) return;

    const ThreadMap threads = LoadThreadMap(config_.paths.threads);
    auto in = internal::OpenForRead(config_.paths.comments);
    const IngestResult result = IngestComments(in, threads);
    {
      auto out = internal::OpenForWrite(raw);
      WriteRawJsonl(out, result.comments);
    }
    {
      auto out = internal::OpenForWrite(rejects);
      for (const auto& r : result.rejects) {
        out << internal::JsonLine()
                   .Field("line", r.line)
                   .Field("id", r.id)
                   .Field("reason", r.reason)
                   .Field("detail", r.detail)
                   .Finish()
            << '\n';
      }
    }
    Log(std::to_string(result.comments.size()) + " comments, " +
        std::to_string(result.rejects.size()) + " rejected");
    Stamp(fp);
  }

  void Align() {
    const fs::path raw_path = Upstream(artifacts::kRawComments, Stage::kIngest);
    Digest digest;
    digest.Add("stage", "align")
        .File("raw", raw_path)
        .File("plays", config_.paths.plays);
    if (config_.paths.games) digest.File("games", *config_.paths.games);
    for (const auto& a : config_.segmenter.abbreviations) digest.Add("abbr", a);
    const std::string fp = digest.hex();
    const fs::path grounded_path = Artifact(artifacts::kGrounded);
    const fs::path dropped_path = Artifact(artifacts::kDropped);
    const fs::path warnings_path = Artifact(artifacts::kAlignWarnings);
    if (UpToDate(fp, {grounded_path, dropped_path, warnings_path})) return;

    std::vector<RawComment> raw;
    {
      auto in = internal::OpenForRead(raw_path);
      raw = ReadRawJsonl(in);
    }
    PlayTable plays = LoadPlaysCsv(config_.paths.plays);
    if (config_.paths.games) {
      ApplyGameTeams(plays, internal::LoadJsonFile(*config_.paths.games));
    }
    std::vector<std::string> warnings = plays.warnings;

    std::map<std::string, std::vector<RawComment>> by_game;
    for (auto& c : raw) by_game[c.game_id].push_back(std::move(c));

    std::vector<GroundedComment> grounded;
    std::vector<std::string> dropped_lines;
    auto drop = [&](const RawComment& c, std::string_view reason) {
      dropped_lines.push_back(internal::JsonLine()
                                  .Field("id", c.id)
                                  .Field("game_id", c.game_id)
                                  .Field("reason", reason)
                                  .Finish());
    };
    for (const auto& [game_id, comments] : by_game) {
      auto it = plays.games.find(game_id);
      if (it == plays.games.end() || it->second.plays.empty() ||
          it->second.home_team.empty() || it->second.away_team.empty()) {
        warnings.push_back("game " + game_id +
                           ": no plays or teams; comments dropped");
        for (const auto& c : comments) drop(c, "unknown-game");
        continue;
      }
      const GameRecord& game = it->second;
      const FilterResult filtered = FilterGameTime(comments, game);
      for (const auto& d : filtered.dropped) {
        drop(d.comment, DropReasonName(d.reason));
      }
      std::vector<RawComment> home;
      std::vector<RawComment> away;
      for (const auto& c : filtered.kept) {
        (c.team == game.home_team ? home : away).push_back(c);
      }
      ParallelCorpus corpus =
          BuildParallelCorpus(home, away, game, config_.segmenter);
      for (auto& w : corpus.warnings) warnings.push_back(std::move(w));
      for (auto& g : corpus.comments) grounded.push_back(std::move(g));
    }
    {
      auto out = internal::OpenForWrite(grounded_path);
      WriteGroundedJsonl(out, grounded);
    }
    std::string dropped_body;
    for (const auto& line : dropped_lines) dropped_body += line + "\n";
    WriteAll(dropped_path, dropped_body);
    std::string warning_body;
    for (const auto& w : warnings) warning_body += w + "\n";
    WriteAll(warnings_path, warning_body);
    Log(std::to_string(grounded.size()) + " grounded, " +
        std::to_string(dropped_lines.size()) + " dropped, " +
        std::to_string(warnings.size()) + " warnings");
    Stamp(fp);
  }

  std::vector<GroundedComment> LoadGrounded() const {
    auto in = internal::OpenForRead(Upstream(artifacts::kGrounded,
                                             Stage::kAlign));
    return ReadGroundedJsonl(in);
  }

  void Tag() {
    const fs::path grounded_path = Upstream(artifacts::kGrounded,
                                            Stage::kAlign);
    const bool mock = !options_.client && config_.mock_endpoint;
    Digest digest;
    digest.Add("stage", "tag")
        .File("grounded", grounded_path)
        .File("lexicon", config_.paths.lexicon)
        .File("few_shot", config_.paths.few_shot)
        .Add("condition", config_.condition.Name())
        .Add("phrasing",
             config_.condition.phrasing == LowWpPhrasing::kOutGroupWins
                 ? "out"
                 : "in")
        .Add("client", options_.client ? "custom" : (mock ? "mock" : "http"))
        .Add("model", config_.endpoint.model)
        .Add("base_url", config_.endpoint.base_url)
        .Add("max_tokens", std::to_string(config_.endpoint.max_tokens))
        .Add("seed", config_.endpoint.seed
                         ? std::to_string(*config_.endpoint.seed)
                         : "none")
        .Add("ensure", config_.lexicon_ensure ? "1" : "0");
    const std::string fp = digest.hex();
    const fs::path model_path = Artifact(artifacts::kModelPredictions);
    const fs::path lexicon_path = Artifact(artifacts::kLexiconPredictions);
    const fs::path predictions_path = Artifact(artifacts::kPredictions);
    const fs::path errors_path = Artifact(artifacts::kTagErrors);
    if (UpToDate(fp, {model_path, lexicon_path, predictions_path,
                      errors_path})) {
      return;
    }

    // The model journal is resumable only for an interrupted run with the
    // same inputs.
    const fs::path pending = out_ / artifacts::kStampDir / "tag.pending";
    bool resume = false;
    if (!options_.force && fs::exists(pending)) {
      resume = utf8::Trim(ReadAll(pending)) == fp;
    }
    if (!resume) fs::remove(model_path);
    WriteAll(pending, fp + "\n");

    const std::vector<GroundedComment> grounded = LoadGrounded();
    auto lexicon = std::make_shared<const Lexicon>(
        Lexicon::Load(config_.paths.lexicon));
    const FewShotSet few_shot = FewShotSet::Load(config_.paths.few_shot);

    std::shared_ptr<ChatClient> client = options_.client;
    if (!client) {
      if (mock) {
        client = std::make_shared<LexiconMockClient>(lexicon);
      } else {
        client = std::make_shared<HttpChatClient>(config_.endpoint);
      }
    }

    std::vector<QueryContext> queries;
    queries.reserve(grounded.size());
    for (const auto& g : grounded) queries.push_back(MakeQuery(g, *lexicon));

    TagBatchOptions batch;
    batch.condition = config_.condition;
    batch.endpoint = config_.endpoint;
    batch.parallelism = config_.parallelism;
    batch.journal = model_path;
    const TagBatchResult result = TagBatch(queries, few_shot, *client, batch);

    std::map<std::string, const GroundedComment*> by_id;
    for (const auto& g : grounded) by_id.emplace(g.comment.id, &g);
    TaggedCorpus merged;
    for (const auto& p : result.predictions) {
      TaggedComment t = p;
      if (config_.lexicon_ensure) {
        t.spans = LexiconTag(*by_id.at(p.comment_id), *lexicon, p.spans);
      }
      merged.push_back(std::move(t));
    }
    TaggedCorpus lexicon_only;
    for (const auto& g : grounded) {
      lexicon_only.push_back(TaggedComment{g.comment.id, g.segmented_body,
                                           LexiconTag(g, *lexicon, {})});
    }
    SaveTaggedCorpus(predictions_path, merged);
    SaveTaggedCorpus(lexicon_path, lexicon_only);
    SaveTagErrors(errors_path, result.errors);
    fs::remove(pending);
    Log(std::to_string(result.predictions.size()) + "/" +
        std::to_string(queries.size()) + " tagged, " +
        std::to_string(result.errors.size()) + " errors, " +
        std::to_string(result.retries) + " retries");
    Stamp(fp);
  }

  void Score() {
    const fs::path predictions_path =
        Upstream(artifacts::kPredictions, Stage::kTag);
    const fs::path lexicon_path =
        Upstream(artifacts::kLexiconPredictions, Stage::kTag);
    if (!config_.paths.gold) {
      throw Error("missing-input", "score needs paths.gold in the config");
    }
    const std::string fp = Digest()
                               .Add("stage", "score")
                               .File("predictions", predictions_path)
                               .File("lexicon", lexicon_path)
                               .File("gold", *config_.paths.gold)
                               .Add("iterations", std::to_string(
                                   config_.bootstrap_iterations))
                               .Add("seed", std::to_string(config_.seed))
                               .hex();
    const fs::path json_path = Artifact(artifacts::kScoreJson);
    const fs::path table_path = Artifact(artifacts::kScoreTable);
    if (UpToDate(fp, {json_path, table_path})) return;

    const TaggedCorpus model = LoadTaggedCorpus(predictions_path);
    const TaggedCorpus lexicon = LoadTaggedCorpus(lexicon_path);
    const TaggedCorpus gold = LoadTaggedCorpus(*config_.paths.gold);
    const ScoreReport model_report = F1Report(gold, model);
    const ScoreReport lexicon_report = F1Report(gold, lexicon);
    const BootstrapResult boot =
        BootstrapCompare(model, lexicon, gold, config_.bootstrap_iterations,
                         config_.seed);
    json doc = {{"model", ScoreReportToJson(model_report)},
                {"lexicon", ScoreReportToJson(lexicon_report)},
                {"bootstrap",
                 {{"system_a", "model"},
                  {"system_b", "lexicon"},
                  {"p_value", boot.p_value},
                  {"observed_delta", boot.observed_delta},
                  {"mean_delta", boot.mean_delta},
                  {"iterations", boot.iterations},
                  {"seed", config_.seed}}}};
    WriteAll(json_path, doc.dump(2) + "\n");
    const std::vector<std::pair<std::string, ScoreReport>> columns = {
        {"model", model_report}, {"lexicon", lexicon_report}};
    WriteAll(table_path, RenderScoreTable(columns));
    Log("weighted macro-F1 " +
        internal::FormatFixed(model_report.weighted_macro_f1 * 100, 1) +
        " (lexicon " +
        internal::FormatFixed(lexicon_report.weighted_macro_f1 * 100, 1) +
        "), bootstrap p = " + internal::FormatFixed(boot.p_value, 3));
    Stamp(fp);
  }

  void Analyze() {
    const fs::path grounded_path =
        Upstream(artifacts::kGrounded, Stage::kAlign);
    const fs::path predictions_path =
        Upstream(artifacts::kPredictions, Stage::kTag);
    Digest digest;
    digest.Add("stage", "analyze")
        .File("grounded", grounded_path)
        .File("predictions", predictions_path)
        .File("lexicon", config_.paths.lexicon)
        .Add("width", std::to_string(config_.window_width));
    for (auto n : config_.normalizations) {
      digest.Add("norm", NormalizationName(n));
    }
    for (const auto& v : config_.variables) digest.Add("var", v.Name());
    const std::string fp = digest.hex();
    const fs::path dir = Artifact(artifacts::kAnalysisDir);
    if (UpToDate(fp, {dir / "summary.json"})) return;

    const std::vector<GroundedComment> grounded = LoadGrounded();
    const TaggedCorpus predictions = LoadTaggedCorpus(predictions_path);
    const Lexicon lexicon = Lexicon::Load(config_.paths.lexicon);
    const JoinResult joined = JoinForAnalysis(grounded, predictions);
    const auto density = CommentDensity(joined.comments, config_.window_width);

    json summary = {{"comments", joined.comments.size()},
                    {"missing_predictions", joined.missing_predictions},
                    {"window_width", config_.window_width}};
    json fits_notes = json::object();
    for (Normalization n : config_.normalizations) {
      const WindowSeries series =
          WindowStats(joined.comments, config_.window_width,
                      config_.variables, n, lexicon);
      const TrendTable trends = FitAll(series);
      ExportReport(dir / std::string(NormalizationName(n)), series, trends,
                   density);
      fits_notes[std::string(NormalizationName(n))] = trends.notes;
    }
    summary["unfit_variables"] = fits_notes;
    WriteAll(dir / "summary.json", summary.dump(2) + "\n");
    Log(std::to_string(joined.comments.size()) + " comments analysed");
    Stamp(fp);
  }

  const RunConfig& config_;
  const PipelineOptions& options_;
  fs::path out_;
  StageOutcome outcome_{Stage::kIngest, false, {}};
};

}  // namespace

std::vector<StageOutcome> RunPipeline(const RunConfig& config,
                                      std::span<const Stage> stages,
                                      const PipelineOptions& options) {
  std::vector<Stage> ordered(stages.begin(), stages.end());
  std::sort(ordered.begin(), ordered.end());
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());
  fs::create_directories(config.paths.out / artifacts::kStampDir);
  Runner runner(config, options);
  std::vector<StageOutcome> outcomes;
  for (Stage s : ordered) outcomes.push_back(runner.Run(s));
  return outcomes;
}

}  // namespace groupref
