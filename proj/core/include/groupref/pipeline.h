#ifndef GROUPREF_PIPELINE_H_
#define GROUPREF_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "groupref/chat_client.h"
#include "groupref/config.h"

namespace groupref {

enum class Stage { kIngest, kAlign, kTag, kScore, kAnalyze };
inline constexpr Stage kAllStages[] = {Stage::kIngest, Stage::kAlign,
                                       Stage::kTag, Stage::kScore,
                                       Stage::kAnalyze};
std::string_view StageName(Stage stage);
// Throws Error("bad-stage").
Stage ParseStage(std::string_view name);

// Fixed artifact names inside the output directory.
namespace artifacts {
inline constexpr const char* kRawComments = "raw_comments.jsonl";
inline constexpr const char* kIngestRejects = "ingest_rejects.jsonl";
inline constexpr const char* kGrounded = "grounded.jsonl";
inline constexpr const char* kDropped = "dropped.jsonl";
inline constexpr const char* kAlignWarnings = "align_warnings.txt";
inline constexpr const char* kModelPredictions = "model_predictions.jsonl";
inline constexpr const char* kLexiconPredictions = "lexicon_predictions.jsonl";
inline constexpr const char* kPredictions = "predictions.jsonl";
inline constexpr const char* kTagErrors = "tag_errors.jsonl";
inline constexpr const char* kScoreJson = "score.json";
inline constexpr const char* kScoreTable = "score.txt";
inline constexpr const char* kAnalysisDir = "analysis";
inline constexpr const char* kStampDir = ".stamps";
}  // namespace artifacts

struct PipelineOptions {
  bool force = false;  // re-run stages even when their stamp is current
  // Chat client for the tag stage; when empty, the config decides between
  // the lexicon mock and the HTTP endpoint.
  std::shared_ptr<ChatClient> client;
  std::function<void(std::string_view)> log;
};

struct StageOutcome {
  Stage stage;
  bool skipped = false;  // stamp was current
  std::vector<std::string> messages;
};

// Runs the requested stages in dependency order. Each stage reads its
// upstream artifacts from `config.paths.out`; a missing one raises
// Error("missing-artifact") naming the stage to run first. A stage whose
// inputs are unchanged since its last successful run is skipped unless
// forced.
std::vector<StageOutcome> RunPipeline(const RunConfig& config,
                                      std::span<const Stage> stages,
                                      const PipelineOptions& options = {});

// 64-bit FNV-1a, used for stage fingerprints.
std::uint64_t Fingerprint(std::string_view data, std::uint64_t seed = 0);

}  // namespace groupref

#endif  // GROUPREF_PIPELINE_H_
