#include "groupref/chat_client.h"

#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "groupref/model_output.h"
#include "groupref/prompt.h"
#include "support/test_support.h"

namespace groupref {
namespace {

using nlohmann::json;

json Completion(const std::string& text) {
  return {{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}}}}}};
}

// An in-process chat-completion endpoint whose status codes are scripted.
class FakeEndpoint {
 public:
  FakeEndpoint() {
    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   const int call = calls_++;
                   {
                     std::lock_guard lock(mu_);
                     last_body_ = req.body;
                     last_auth_ = req.get_header_value("Authorization");
                   }
                   const int status = call < static_cast<int>(statuses_.size())
                                          ? statuses_[call]
                                          : 200;
                   res.status = status;
                   if (status == 200) {
                     res.set_content(Completion("hello").dump(),
                                     "application/json");
                   } else {
                     res.set_content("{\"error\":\"scripted\"}",
                                     "application/json");
                   }
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  void Script(std::vector<int> statuses) { statuses_ = std::move(statuses); }
  int calls() const { return calls_; }
  std::string last_body() {
    std::lock_guard lock(mu_);
    return last_body_;
  }
  std::string last_auth() {
    std::lock_guard lock(mu_);
    return last_auth_;
  }
  EndpointConfig Config() const {
    EndpointConfig c;
    c.base_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1";
    c.model = "test-model";
    c.api_key_env = "GROUPREF_TEST_API_KEY";
    c.max_tokens = 64;
    c.timeout = std::chrono::milliseconds(5000);
    c.retry.max_attempts = 3;
    c.retry.initial_backoff = std::chrono::milliseconds(1);
    c.seed = 1;
    return c;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::vector<int> statuses_;
  std::atomic<int> calls_{0};
  std::mutex mu_;
  std::string last_body_;
  std::string last_auth_;
};

ChatRequest Request() {
  ChatRequest r;
  r.model = "test-model";
  r.messages = {{"user", "tag this"}};
  r.temperature = 0.25;
  r.max_tokens = 64;
  r.seed = 1;
  return r;
}

TEST(ChatRequestTest, WireShape) {
  const json j = ChatRequestToJson(Request());
  EXPECT_EQ(j.at("model"), "test-model");
  EXPECT_EQ(j.at("messages").at(0).at("role"), "user");
  EXPECT_EQ(j.at("messages").at(0).at("content"), "tag this");
  EXPECT_EQ(j.at("temperature"), 0.25);
  EXPECT_EQ(j.at("max_tokens"), 64);
  EXPECT_EQ(j.at("seed"), 1);
  ChatRequest no_seed = Request();
  no_seed.seed.reset();
  EXPECT_FALSE(ChatRequestToJson(no_seed).contains("seed"));
}

TEST(ChatRequestTest, ExtractCompletionText) {
  EXPECT_EQ(ExtractCompletionText(Completion("hi")), "hi");
  EXPECT_THROW(ExtractCompletionText(json::object()), Error);
}

TEST(EndpointConfigTest, ValidatesAndParses) {
  const EndpointConfig c = EndpointConfig::FromJson(
      {{"base_url", "http://x/v1"},
       {"model", "m"},
       {"timeout_ms", 1000},
       {"retry", {{"max_attempts", 5}, {"backoff_ms", 10}}},
       {"seed", 3}});
  EXPECT_EQ(c.retry.max_attempts, 5);
  EXPECT_EQ(c.timeout.count(), 1000);
  EXPECT_EQ(c.seed, 3);
  EXPECT_THROW(EndpointConfig::FromJson({{"retry", {{"max_attempts", 0}}}}),
               Error);
  EXPECT_THROW(EndpointConfig::FromJson({{"timeout_ms", 0}}), Error);
}

TEST(HttpChatClientTest, PostsRequestWithBearerToken) {
  FakeEndpoint endpoint;
  ::setenv("GROUPREF_TEST_API_KEY", "sk-test", 1);
  HttpChatClient client(endpoint.Config());
  EXPECT_EQ(client.Complete(Request()), "hello");
  EXPECT_EQ(endpoint.last_auth(), "Bearer sk-test");
  const json body = json::parse(endpoint.last_body());
  EXPECT_EQ(body, ChatRequestToJson(Request()));
}

TEST(HttpChatClientTest, RetriesServerErrors) {
  FakeEndpoint endpoint;
  endpoint.Script({500, 503});
  HttpChatClient client(endpoint.Config());
  std::vector<long long> sleeps;
  const auto outcome = CompleteWithRetry(
      client, Request(), endpoint.Config().retry,
      [&](std::chrono::milliseconds d) { sleeps.push_back(d.count()); });
  ASSERT_TRUE(outcome.text.has_value());
  EXPECT_EQ(*outcome.text, "hello");
  EXPECT_EQ(outcome.attempts, 3);
  EXPECT_EQ(endpoint.calls(), 3);
  EXPECT_EQ(sleeps, (std::vector<long long>{1, 2}));
}

TEST(HttpChatClientTest, DoesNotRetryClientErrors) {
  FakeEndpoint endpoint;
  endpoint.Script({400});
  HttpChatClient client(endpoint.Config());
  const auto outcome =
      CompleteWithRetry(client, Request(), endpoint.Config().retry, [](auto) {});
  EXPECT_FALSE(outcome.text.has_value());
  EXPECT_EQ(outcome.attempts, 1);
  EXPECT_EQ(endpoint.calls(), 1);
  ASSERT_EQ(outcome.errors.size(), 1u);
  EXPECT_NE(outcome.errors[0].find("endpoint-rejected"), std::string::npos);
}

TEST(HttpChatClientTest, GivesUpAfterBudget) {
  FakeEndpoint endpoint;
  endpoint.Script({500, 500, 500, 500});
  HttpChatClient client(endpoint.Config());
  const auto outcome =
      CompleteWithRetry(client, Request(), endpoint.Config().retry, [](auto) {});
  EXPECT_FALSE(outcome.text.has_value());
  EXPECT_EQ(outcome.attempts, 3);
  EXPECT_EQ(outcome.errors.size(), 3u);
}

TEST(HttpChatClientTest, UnreachableIsTransportError) {
  EndpointConfig c;
  c.base_url = "http://127.0.0.1:1/v1";
  c.timeout = std::chrono::milliseconds(500);
  HttpChatClient client(c);
  EXPECT_THROW(client.Complete(Request()), TransportError);
  c.base_url = "no-scheme";
  EXPECT_THROW(HttpChatClient{c}, Error);
}

TEST(LexiconMockClientTest, AnswersInTaggingFormat) {
  auto lexicon = std::make_shared<Lexicon>(testing::BundledLexicon());
  LexiconMockClient mock(lexicon);
  QueryContext q;
  q.comment = "[SENT] How are we this bad vs the Eagles";
  q.in_group = "Steelers";
  q.out_group = "Eagles";
  q.wp = 0.12;
  PromptCondition condition;
  ChatRequest request = Request();
  request.messages = {
      {"user", BuildPrompt(q, condition, testing::BundledFewShot())}};
  const std::string raw = mock.Complete(request);
  const ModelResponse r = ParseModelOutput(raw, q.comment);
  EXPECT_EQ(r.status, ParseStatus::kOk) << raw;
  ASSERT_EQ(r.spans.size(), 2u);
  EXPECT_EQ(r.spans[0].label, TagLabel::kIn);
  EXPECT_EQ(r.spans[1].label, TagLabel::kOut);
  EXPECT_EQ(mock.Complete(request), raw);
}

}  // namespace
}  // namespace groupref
