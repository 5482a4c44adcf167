#ifndef GROUPREF_CHAT_CLIENT_H_
#define GROUPREF_CHAT_CLIENT_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "groupref/error.h"
#include "groupref/lexicon.h"

namespace groupref {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 1.0;
  int max_tokens = 512;
  std::optional<std::int64_t> seed;
};

// {model, messages: [{role, content}], temperature, max_tokens, seed?}
nlohmann::json ChatRequestToJson(const ChatRequest& request);
// Text of choices[0].message.content; throws Error("bad-response").
std::string ExtractCompletionText(const nlohmann::json& response);

// Raised for failures worth retrying (connection errors, 5xx, 429).
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& message)
      : Error("endpoint-failed", message) {}
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Returns the completion text. Must be safe to call concurrently.
  virtual std::string Complete(const ChatRequest& request) = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double backoff_factor = 2.0;
};

struct EndpointConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o";
  std::string api_key_env = "OPENAI_API_KEY";  // variable name, not the key
  int max_tokens = 512;
  std::chrono::milliseconds timeout{60000};
  RetryPolicy retry;
  std::optional<std::int64_t> seed;

  // Throws Error("bad-endpoint") unless max_attempts >= 1 and timeout > 0.
  void Validate() const;
  static EndpointConfig FromJson(const nlohmann::json& j);
};

// Chat-completion client over HTTP(S): POST {base_url}/chat/completions
// with a Bearer token read from the configured environment variable.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(EndpointConfig config);
  std::string Complete(const ChatRequest& request) override;

 private:
  EndpointConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

// Always answers with the same text.
class FixedResponseClient : public ChatClient {
 public:
  explicit FixedResponseClient(std::string response)
      : response_(std::move(response)) {}
  std::string Complete(const ChatRequest&) override { return response_; }

 private:
  std::string response_;
};

// Offline stand-in for a model: reads the query block at the end of a
// tagging prompt, tags it with the lexicon and answers in the expected
// ref_expressions / explanation / target format. Deterministic.
class LexiconMockClient : public ChatClient {
 public:
  explicit LexiconMockClient(std::shared_ptr<const Lexicon> lexicon)
      : lexicon_(std::move(lexicon)) {}
  std::string Complete(const ChatRequest& request) override;

 private:
  std::shared_ptr<const Lexicon> lexicon_;
};

struct CompletionOutcome {
  std::optional<std::string> text;  // nullopt when every attempt failed
  int attempts = 0;
  std::vector<std::string> errors;  // one entry per failed attempt
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Retries TransportError with exponential backoff; other errors are not
// retried.
CompletionOutcome CompleteWithRetry(ChatClient& client,
                                    const ChatRequest& request,
                                    const RetryPolicy& policy,
                                    const Sleeper& sleep = {});

}  // namespace groupref

#endif  // GROUPREF_CHAT_CLIENT_H_
