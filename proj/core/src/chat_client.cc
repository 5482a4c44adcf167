#include "groupref/chat_client.h"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "groupref/prompt.h"
#include "groupref/utf8.h"

namespace groupref {

using nlohmann::json;

json ChatRequestToJson(const ChatRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  json body = {{"model", request.model},
               {"messages", messages},
               {"temperature", request.temperature},
               {"max_tokens", request.max_tokens}};
  if (request.seed) body["seed"] = *request.seed;
  return body;
}

std::string ExtractCompletionText(const json& response) {
  try {
    const auto& content = response.at("choices").at(0).at("message").at(
        "content");
    if (content.is_null()) return "";
    return content.get<std::string>();
  } catch (const json::exception& e) {
    throw Error("bad-response", e.what());
  }
}

void EndpointConfig::Validate() const {
  if (retry.max_attempts < 1) {
    throw Error("bad-endpoint", "retry.max_attempts must be >= 1");
  }
  if (timeout.count() <= 0) throw Error("bad-endpoint", "timeout must be > 0");
  if (max_tokens <= 0) throw Error("bad-endpoint", "max_tokens must be > 0");
}

EndpointConfig EndpointConfig::FromJson(const json& j) {
  EndpointConfig c;
  c.base_url = j.value("base_url", c.base_url);
  c.model = j.value("model", c.model);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.max_tokens = j.value("max_tokens", c.max_tokens);
  if (j.contains("timeout_ms")) {
    c.timeout = std::chrono::milliseconds(j.at("timeout_ms").get<long long>());
  }
  if (auto it = j.find("retry"); it != j.end()) {
    c.retry.max_attempts = it->value("max_attempts", c.retry.max_attempts);
    c.retry.initial_backoff = std::chrono::milliseconds(
        it->value("backoff_ms", static_cast<long long>(
                                    c.retry.initial_backoff.count())));
    c.retry.backoff_factor = it->value("backoff_factor", c.retry.backoff_factor);
  }
  if (auto it = j.find("seed"); it != j.end() && !it->is_null()) {
    c.seed = it->get<std::int64_t>();
  }
  c.Validate();
  return c;
}

// ------------------------------------------------------------------ http

HttpChatClient::HttpChatClient(EndpointConfig config)
    : config_(std::move(config)) {
  config_.Validate();
  const std::string& url = config_.base_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error("bad-endpoint", "base_url needs a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') {
    path_prefix_.pop_back();
  }
}

std::string HttpChatClient::Complete(const ChatRequest& request) {
  httplib::Client client(scheme_host_port_);
  if (!client.is_valid()) {
    throw Error("bad-endpoint", "unsupported endpoint " + scheme_host_port_);
  }
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(
      config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
                         config_.timeout - secs)
                         .count();
  client.set_connection_timeout(secs.count(), usecs);
  client.set_read_timeout(secs.count(), usecs);
  client.set_write_timeout(secs.count(), usecs);

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  const std::string body = ChatRequestToJson(request).dump();
  auto res = client.Post(path_prefix_ + "/chat/completions", headers, body,
                         "application/json");
  if (!res) {
    throw TransportError("request failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransportError("HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw Error("endpoint-rejected",
                "HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  json parsed;
  try {
    parsed = json::parse(res->body);
  } catch (const json::exception& e) {
    throw Error("bad-response", e.what());
  }
  return ExtractCompletionText(parsed);
}

// ------------------------------------------------------------------ mock

namespace {

// Value of the last "label: value" paragraph in `prompt` after `from`.
std::optional<std::string> FieldAfter(std::string_view prompt,
                                      std::size_t from,
                                      std::string_view label) {
  const std::string needle = "\n\n" + std::string(label) + ": ";
  const auto pos = prompt.find(needle, from);
  if (pos == std::string_view::npos) return std::nullopt;
  const auto start = pos + needle.size();
  const auto end = prompt.find("\n\n", start);
  return std::string(prompt.substr(start, end == std::string_view::npos
                                              ? std::string_view::npos
                                              : end - start));
}

}  // namespace

std::string LexiconMockClient::Complete(const ChatRequest& request) {
  if (request.messages.empty()) return "";
  const std::string& prompt = request.messages.back().content;
  const std::string_view trimmed = utf8::Trim(prompt);
  if (trimmed.size() >= 12 &&
      utf8::AsciiLower(trimmed.substr(trimmed.size() - 12)) ==
          "explanation:") {
    return "explanation: The tagged expressions name the teams involved or "
           "use first-person plural forms that refer to the in-group.";
  }
  const auto query = prompt.rfind("\n\ncomment: ");
  if (query == std::string::npos) return "no target";
  const auto comment_start = query + std::string_view("\n\ncomment: ").size();
  const auto comment_end = prompt.find("\n\nparent comment: ", comment_start);
  if (comment_end == std::string::npos) return "no target";
  const std::string comment =
      prompt.substr(comment_start, comment_end - comment_start);
  const auto in_name = FieldAfter(prompt, comment_end, "in-group");
  const auto out_name = FieldAfter(prompt, comment_end, "out-group");
  const TeamId team =
      in_name ? lexicon_->FindTeam(*in_name).value_or(*in_name) : TeamId{};
  const TeamId opponent =
      out_name ? lexicon_->FindTeam(*out_name).value_or(*out_name) : TeamId{};

  TaggedComment tagged;
  tagged.text = comment;
  tagged.spans = LexiconTag(comment, team, opponent, *lexicon_, {});
  const std::u32string text = utf8::Decode(comment);
  std::vector<std::string> refs;
  for (const auto& span : tagged.spans) refs.push_back(SpanSurface(text, span));

  std::string out = FormatRefList(refs) + "\n\nexplanation: ";
  out += refs.empty()
             ? "No explicit or implicit references to tag."
             : "These expressions name a team or use first-person plural "
               "forms, tagged relative to the commenter's team.";
  out += "\n\ntarget: " + RenderTagged(tagged);
  return out;
}

// ----------------------------------------------------------------- retry

CompletionOutcome CompleteWithRetry(ChatClient& client,
                                    const ChatRequest& request,
                                    const RetryPolicy& policy,
                                    const Sleeper& sleep) {
  CompletionOutcome outcome;
  auto backoff = policy.initial_backoff;
  const int attempts = std::max(1, policy.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    outcome.attempts = attempt;
    try {
      outcome.text = client.Complete(request);
      return outcome;
    } catch (const TransportError& e) {
      outcome.errors.emplace_back(e.what());
    } catch (const std::exception& e) {
      outcome.errors.emplace_back(e.what());
      return outcome;
    }
    if (attempt < attempts && backoff.count() > 0) {
      if (sleep) {
        sleep(backoff);
      } else {
        std::this_thread::sleep_for(backoff);
      }
      backoff = std::chrono::milliseconds(static_cast<long long>(
          static_cast<double>(backoff.count()) * policy.backoff_factor));
    }
  }
  return outcome;
}

}  // namespace groupref
