#include "groupref/tag_batch.h"

#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "groupref/utf8.h"
#include "text_io.h"

namespace groupref {

using nlohmann::json;

json TagErrorToJson(const TagError& error) {
  json j = {{"comment_id", error.comment_id},
            {"stage", error.stage},
            {"reason", error.reason}};
  if (!error.detail.empty()) j["detail"] = error.detail;
  return j;
}

TagError TagErrorFromJson(const json& j) {
  try {
    return TagError{j.at("comment_id").get<std::string>(),
                    j.at("stage").get<std::string>(),
                    j.at("reason").get<std::string>(),
                    j.value("detail", std::string())};
  } catch (const json::exception& e) {
    throw Error("bad-record", e.what());
  }
}

void SaveTagErrors(const std::filesystem::path& path,
                   const std::vector<TagError>& errors) {
  auto out = internal::OpenForWrite(path);
  for (const auto& e : errors) out << TagErrorToJson(e).dump() << '\n';
}

std::vector<TagError> LoadTagErrors(const std::filesystem::path& path) {
  auto in = internal::OpenForRead(path);
  std::vector<TagError> errors;
  std::string line;
  while (std::getline(in, line)) {
    if (utf8::Trim(line).empty()) continue;
    try {
      errors.push_back(TagErrorFromJson(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error("bad-json", e.what());
    }
  }
  return errors;
}

namespace {

// Runs fn(i) for i in [0, n) on up to `parallelism` threads.
template <typename Fn>
void ParallelFor(std::size_t n, int parallelism, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(parallelism));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

ChatRequest MakeRequest(const EndpointConfig& endpoint, std::string prompt,
                        double temperature) {
  ChatRequest request;
  request.model = endpoint.model;
  request.messages.push_back({"user", std::move(prompt)});
  request.temperature = temperature;
  request.max_tokens = endpoint.max_tokens;
  request.seed = endpoint.seed;
  return request;
}

TagError RequestError(const std::string& comment_id,
                      const CompletionOutcome& outcome) {
  std::string detail = outcome.errors.empty() ? "" : outcome.errors.back();
  // Non-retryable failures keep their own code ("endpoint-rejected", ...).
  std::string reason = "endpoint-failed";
  if (const auto colon = detail.find(':'); colon != std::string::npos) {
    const std::string code = detail.substr(0, colon);
    if (code.find(' ') == std::string::npos) reason = code;
  }
  return TagError{comment_id, "request", reason, detail};
}

TaggedCorpus ReadJournal(const std::filesystem::path& path) {
  TaggedCorpus done;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (utf8::Trim(line).empty()) continue;
    // A torn final line from an interrupted run is ignored.
    try {
      done.push_back(TaggedFromJson(json::parse(line)));
    } catch (const std::exception&) {
    }
  }
  return done;
}

}  // namespace

TagBatchResult TagBatch(const std::vector<QueryContext>& queries,
                        const FewShotSet& few_shot, ChatClient& client,
                        const TagBatchOptions& options) {
  if (options.parallelism < 1) {
    throw Error("bad-parallelism", "parallelism must be >= 1");
  }
  const std::size_t n = queries.size();
  TagBatchResult result;
  result.outcomes.resize(n);
  std::vector<std::optional<TaggedComment>> slots(n);
  std::vector<std::optional<TagError>> failures(n);

  std::map<std::string, TaggedComment> committed;
  if (options.journal && std::filesystem::exists(*options.journal)) {
    for (auto& t : ReadJournal(*options.journal)) {
      committed.emplace(t.comment_id, std::move(t));
    }
  }
  std::ofstream journal;
  if (options.journal) {
    if (options.journal->has_parent_path()) {
      std::filesystem::create_directories(options.journal->parent_path());
    }
    journal.open(*options.journal, std::ios::app);
    if (!journal) {
      throw Error("io", "cannot open " + options.journal->string());
    }
  }
  std::mutex journal_mu;

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < n; ++i) {
    auto& outcome = result.outcomes[i];
    outcome.comment_id = queries[i].comment_id;
    outcome.temperature = TemperatureFor(queries[i].wp, options.condition);
    if (auto it = committed.find(queries[i].comment_id);
        it != committed.end()) {
      slots[i] = it->second;
      outcome.resumed = true;
      outcome.status = ParseStatus::kOk;
    } else {
      pending.push_back(i);
    }
  }

  ParallelFor(pending.size(), options.parallelism, [&](std::size_t k) {
    const std::size_t i = pending[k];
    const QueryContext& query = queries[i];
    auto& outcome = result.outcomes[i];
    const ChatRequest request =
        MakeRequest(options.endpoint,
                    BuildPrompt(query, options.condition, few_shot),
                    outcome.temperature);
    const CompletionOutcome completion = CompleteWithRetry(
        client, request, options.endpoint.retry, options.sleep);
    outcome.attempts = completion.attempts;
    if (!completion.text) {
      failures[i] = RequestError(query.comment_id, completion);
      return;
    }
    const ModelResponse response =
        ParseModelOutput(*completion.text, query.comment);
    outcome.status = response.status;
    if (response.status == ParseStatus::kNoTarget ||
        response.status == ParseStatus::kAlignmentFailed) {
      failures[i] =
          TagError{query.comment_id, "parse",
                   std::string(ParseStatusName(response.status)),
                   response.detail};
      return;
    }
    TaggedComment tagged{query.comment_id, query.comment, response.spans};
    if (journal.is_open()) {
      const std::string line = TaggedToJson(tagged).dump();
      std::lock_guard<std::mutex> lock(journal_mu);
      journal << line << '\n';
      journal.flush();
    }
    slots[i] = std::move(tagged);
  });

  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i]) result.predictions.push_back(std::move(*slots[i]));
    if (failures[i]) result.errors.push_back(std::move(*failures[i]));
    result.retries += std::max(0, result.outcomes[i].attempts - 1);
  }

  if (options.journal) {
    journal.close();
    // Rewrite in input order, keeping committed entries for comments that
    // are not part of this batch.
    std::set<std::string> seen;
    for (const auto& p : result.predictions) seen.insert(p.comment_id);
    TaggedCorpus ordered = result.predictions;
    for (const auto& [id, t] : committed) {
      if (!seen.count(id)) ordered.push_back(t);
    }
    const auto tmp = std::filesystem::path(options.journal->string() + ".tmp");
    SaveTaggedCorpus(tmp, ordered);
    std::filesystem::rename(tmp, *options.journal);
  }
  return result;
}

std::string CleanExplanation(std::string_view raw) {
  std::string_view text = utf8::Trim(raw);
  constexpr std::string_view kLabel = "explanation:";
  if (text.size() >= kLabel.size() &&
      utf8::AsciiLower(text.substr(0, kLabel.size())) == kLabel) {
    text = utf8::Trim(text.substr(kLabel.size()));
  }
  return std::string(text);
}

ExplanationResult GenerateExplanations(const std::vector<QueryContext>& queries,
                                       const TaggedCorpus& gold,
                                       const FewShotSet& few_shot,
                                       ChatClient& client,
                                       const TagBatchOptions& options) {
  if (options.parallelism < 1) {
    throw Error("bad-parallelism", "parallelism must be >= 1");
  }
  std::map<std::string, const TaggedComment*> by_id;
  for (const auto& g : gold) by_id.emplace(g.comment_id, &g);

  struct Job {
    const QueryContext* query;
    const TaggedComment* gold;
  };
  std::vector<Job> jobs;
  for (const auto& q : queries) {
    if (auto it = by_id.find(q.comment_id); it != by_id.end()) {
      jobs.push_back({&q, it->second});
    }
  }
  std::vector<std::optional<ExplanationRecord>> records(jobs.size());
  std::vector<std::optional<TagError>> failures(jobs.size());

  ParallelFor(jobs.size(), options.parallelism, [&](std::size_t i) {
    const QueryContext& query = *jobs[i].query;
    const TaggedComment& target = *jobs[i].gold;
    const std::u32string text = utf8::Decode(target.text);
    std::vector<std::string> refs;
    for (const auto& span : target.spans) {
      if (!span.implicit) refs.push_back(SpanSurface(text, span));
    }
    const ChatRequest request = MakeRequest(
        options.endpoint,
        BuildExplanationPrompt(query, refs, RenderTagged(target),
                               options.condition, few_shot),
        TemperatureFor(query.wp, options.condition));
    const CompletionOutcome completion = CompleteWithRetry(
        client, request, options.endpoint.retry, options.sleep);
    if (!completion.text) {
      failures[i] = RequestError(query.comment_id, completion);
      return;
    }
    records[i] = ExplanationRecord{query.comment_id,
                                   CleanExplanation(*completion.text)};
  });

  ExplanationResult result;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (records[i]) result.explanations.push_back(std::move(*records[i]));
    if (failures[i]) result.errors.push_back(std::move(*failures[i]));
  }
  return result;
}

}  // namespace groupref
