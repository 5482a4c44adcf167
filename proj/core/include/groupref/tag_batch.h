#ifndef GROUPREF_TAG_BATCH_H_
#define GROUPREF_TAG_BATCH_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "groupref/chat_client.h"
#include "groupref/interchange.h"
#include "groupref/model_output.h"
#include "groupref/prompt.h"

namespace groupref {

// One row of the sidecar error ledger.
struct TagError {
  std::string comment_id;
  std::string stage;   // "request" or "parse"
  std::string reason;  // "endpoint-failed", "alignment-failed", ...
  std::string detail;

  bool operator==(const TagError&) const = default;
};

nlohmann::json TagErrorToJson(const TagError& error);
TagError TagErrorFromJson(const nlohmann::json& j);
void SaveTagErrors(const std::filesystem::path& path,
                   const std::vector<TagError>& errors);
std::vector<TagError> LoadTagErrors(const std::filesystem::path& path);

struct TagBatchOptions {
  PromptCondition condition;
  EndpointConfig endpoint;  // model, max_tokens, seed and retry policy
  int parallelism = 1;
  // Predictions are appended here as they complete; comment ids already
  // present are skipped on the next run. On completion the file is
  // rewritten in input order.
  std::optional<std::filesystem::path> journal;
  Sleeper sleep;  // backoff hook; empty = real sleep
};

// Per-comment bookkeeping, in input order.
struct TagOutcome {
  std::string comment_id;
  int attempts = 0;  // 0 when resumed from the journal
  double temperature = 1.0;
  std::optional<ParseStatus> status;  // nullopt when the request failed
  bool resumed = false;
};

struct TagBatchResult {
  TaggedCorpus predictions;  // input order; comments with errors omitted
  std::vector<TagError> errors;
  std::vector<TagOutcome> outcomes;
  int retries = 0;  // extra attempts over all comments
};

// Builds a prompt per comment, requests a completion at the condition's
// temperature, and parses the target into spans. Failures are recorded per
// comment and never abort the batch. Throws Error("bad-parallelism") when
// parallelism < 1.
TagBatchResult TagBatch(const std::vector<QueryContext>& queries,
                        const FewShotSet& few_shot, ChatClient& client,
                        const TagBatchOptions& options);

struct ExplanationRecord {
  std::string comment_id;
  std::string explanation;
};

struct ExplanationResult {
  std::vector<ExplanationRecord> explanations;  // input order
  std::vector<TagError> errors;
};

// Asks the endpoint for the explanation section of each gold record, given
// its ref list and tagged target. `queries` and `gold` are joined on
// comment_id; queries without a gold record are skipped.
ExplanationResult GenerateExplanations(const std::vector<QueryContext>& queries,
                                       const TaggedCorpus& gold,
                                       const FewShotSet& few_shot,
                                       ChatClient& client,
                                       const TagBatchOptions& options);

// Drops a leading "explanation:" label and surrounding whitespace.
std::string CleanExplanation(std::string_view raw);

}  // namespace groupref

#endif  // GROUPREF_TAG_BATCH_H_
