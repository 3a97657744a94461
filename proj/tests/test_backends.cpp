#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "toxsearch/http_backends.hpp"
#include "toxsearch/simulators.hpp"

using namespace toxsearch;
using nlohmann::json;

TEST_CASE("chat request serialization matches the pinned fixture") {
  GeneratorConfig config;
  config.model = "test-model";
  config.temperature = 0.9;
  config.max_tokens = 256;
  json request = build_chat_request(
      config, {{"system", "be helpful"}, {"user", "say hi"}});
  json pinned = json::parse(R"({
    "model": "test-model",
    "messages": [
      {"role": "system", "content": "be helpful"},
      {"role": "user", "content": "say hi"}
    ],
    "temperature": 0.9,
    "max_tokens": 256
  })");
  CHECK(request == pinned);
}

TEST_CASE("chat response parsing against the pinned fixture") {
  json pinned = json::parse(R"({
    "id": "chatcmpl-123",
    "object": "chat.completion",
    "choices": [
      {"index": 0,
       "message": {"role": "assistant", "content": "hello there"},
       "finish_reason": "stop"}
    ],
    "usage": {"prompt_tokens": 5, "completion_tokens": 2}
  })");
  CHECK(parse_chat_response(pinned) == "hello there");
  CHECK_THROWS_AS(parse_chat_response(json{{"choices", json::array()}}),
                  BackendError);
  CHECK_THROWS_AS(parse_chat_response(json::object()), BackendError);
}

TEST_CASE("moderation request serialization matches the pinned fixture") {
  json request = build_analyze_request("some comment text");
  json pinned = json::parse(R"({
    "comment": {"text": "some comment text"},
    "requestedAttributes": {
      "TOXICITY": {}, "SEVERE_TOXICITY": {}, "INSULT": {},
      "IDENTITY_ATTACK": {}, "THREAT": {}, "PROFANITY": {}
    },
    "doNotStore": true
  })");
  CHECK(request == pinned);
}

TEST_CASE("moderation response parsing against the pinned fixture") {
  json pinned = json::parse(R"({
    "attributeScores": {
      "TOXICITY": {"summaryScore": {"value": 0.83, "type": "PROBABILITY"}},
      "INSULT": {"summaryScore": {"value": 0.41, "type": "PROBABILITY"}}
    },
    "languages": ["en"]
  })");
  auto scores = parse_analyze_response(pinned);
  CHECK(scores.toxicity() == doctest::Approx(0.83));
  CHECK(scores.attributes.at("INSULT") == doctest::Approx(0.41));

  json no_toxicity = json::parse(
      R"({"attributeScores": {"INSULT": {"summaryScore": {"value": 0.4}}}})");
  CHECK_THROWS_AS(parse_analyze_response(no_toxicity), BackendError);

  json out_of_range = json::parse(
      R"({"attributeScores": {"TOXICITY": {"summaryScore": {"value": 1.7}}}})");
  CHECK_THROWS_AS(parse_analyze_response(out_of_range), BackendError);
}

TEST_CASE("embedding wire shapes") {
  EmbedderConfig config;
  config.model = "all-MiniLM-L6-v2";
  json request = build_embedding_request(config, {"a", "b"});
  CHECK(request ==
        json::parse(R"({"model": "all-MiniLM-L6-v2", "input": ["a", "b"]})"));

  json response = json::parse(R"({
    "data": [
      {"embedding": [1.0, 0.0], "index": 0},
      {"embedding": [0.0, 1.0], "index": 1}
    ]
  })");
  auto vectors = parse_embedding_response(response);
  REQUIRE(vectors.size() == 2);
  CHECK(vectors[0] == std::vector<double>{1.0, 0.0});

  json mismatched = json::parse(
      R"({"data": [{"embedding": [1.0, 0.0]}, {"embedding": [1.0]}]})");
  CHECK_THROWS_AS(parse_embedding_response(mismatched), BackendError);
}

TEST_CASE("scripted generator consumes queues in order and then fails") {
  ScriptedGenerator gen;
  gen.enqueue(OperatorKind::Negation, "negation answer");
  gen.enqueue_default("A");
  gen.enqueue_default("B");

  GeneratorRequest req;
  req.op = OperatorKind::Negation;
  CHECK(gen.generate(req) == "negation answer");
  CHECK(gen.generate(req) == "A");  // falls through to the default queue
  req.op = OperatorKind::Paraphrasing;
  CHECK(gen.generate(req) == "B");
  CHECK_THROWS_AS(gen.generate(req), BackendUnavailable);
}

TEST_CASE("lexicon oracle scoring formula") {
  LexiconModeration oracle({{"distrust", 1.0}, {"blame", 1.0}});
  CHECK(oracle.moderate("nothing matches here").toxicity() == 0.0);
  CHECK(oracle.moderate("why distrust them").toxicity() == doctest::Approx(0.5));
  CHECK(oracle.moderate("distrust and blame").toxicity() ==
        doctest::Approx(2.0 / 3.0));
  // case-insensitive whole-word matching; substrings do not match
  CHECK(oracle.moderate("DISTRUST!").toxicity() == doctest::Approx(0.5));
  CHECK(oracle.moderate("distrustful").toxicity() == 0.0);
}

TEST_CASE("lexicon oracle is monotone in matched terms") {
  LexiconModeration oracle({{"a", 0.5}, {"b", 1.5}, {"c", 3.0}});
  double s1 = oracle.moderate("a").toxicity();
  double s2 = oracle.moderate("a b").toxicity();
  double s3 = oracle.moderate("a b c").toxicity();
  CHECK(s1 < s2);
  CHECK(s2 < s3);
  CHECK(s3 < 1.0);
  CHECK_THROWS(LexiconModeration({{"x", -1.0}}));
}

TEST_CASE("hash embedder is deterministic and unit-norm") {
  HashEmbedder embedder(64);
  auto a = embedder.embed({"why do people lie?", "why do people lie?"});
  CHECK(a[0] == a[1]);
  for (const auto& v : a) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-9));
  }
  auto b = embedder.embed({""});  // degenerate text still yields a unit vector
  double norm = 0.0;
  for (double x : b[0]) norm += x * x;
  CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-9));
}

namespace {

struct TestServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  TestServer() {
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~TestServer() {
    server.stop();
    thread.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port); }
};

}  // namespace

TEST_CASE("chat client retries 5xx and succeeds within budget") {
  TestServer ts;
  std::atomic<int> hits{0};
  ts.server.Post("/v1/chat/completions",
                 [&](const httplib::Request&, httplib::Response& res) {
                   int n = ++hits;
                   if (n <= 2) {
                     res.status = 500;
                     return;
                   }
                   res.set_content(
                       R"({"choices":[{"message":{"role":"assistant","content":"ok"}}]})",
                       "application/json");
                 });
  GeneratorConfig config;
  config.endpoint = ts.endpoint();
  config.model = "m";
  config.retry.max_attempts = 3;
  config.retry.backoff_ms = 10;
  HttpChatClient client(config);
  CHECK(client.complete({{"user", "hi"}}) == "ok");
  CHECK(hits.load() == 3);
}

TEST_CASE("chat client gives up after the retry budget") {
  TestServer ts;
  ts.server.Post("/v1/chat/completions",
                 [](const httplib::Request&, httplib::Response& res) {
                   res.status = 500;
                 });
  GeneratorConfig config;
  config.endpoint = ts.endpoint();
  config.retry.max_attempts = 3;
  config.retry.backoff_ms = 5;
  HttpChatClient client(config);
  CHECK_THROWS_AS(client.complete({{"user", "hi"}}), BackendUnavailable);
}

TEST_CASE("moderation client round-trips over HTTP") {
  TestServer ts;
  json seen;
  ts.server.Post("/v1alpha1/comments:analyze",
                 [&](const httplib::Request& req, httplib::Response& res) {
                   seen = json::parse(req.body);
                   res.set_content(
                       R"({"attributeScores":{"TOXICITY":{"summaryScore":{"value":0.42}}}})",
                       "application/json");
                 });
  ModerationConfig config;
  config.endpoint = ts.endpoint();
  config.retry.backoff_ms = 5;
  HttpModerationClient client(config);
  CHECK(client.moderate("text under test").toxicity() == doctest::Approx(0.42));
  CHECK(seen.at("comment").at("text") == "text under test");
  CHECK(seen.at("requestedAttributes").size() == 6);
}

TEST_CASE("http embedder normalizes and checks counts") {
  TestServer ts;
  ts.server.Post("/v1/embeddings",
                 [](const httplib::Request&, httplib::Response& res) {
                   res.set_content(
                       R"({"data":[{"embedding":[3.0,4.0]},{"embedding":[0.0,2.0]}]})",
                       "application/json");
                 });
  EmbedderConfig config;
  config.endpoint = ts.endpoint();
  config.retry.backoff_ms = 5;
  HttpEmbedder embedder(config);
  auto vectors = embedder.embed({"a", "b"});
  REQUIRE(vectors.size() == 2);
  CHECK(vectors[0][0] == doctest::Approx(0.6));
  CHECK(vectors[0][1] == doctest::Approx(0.8));

  // server returns two vectors for three inputs -> error
  CHECK_THROWS_AS(embedder.embed({"a", "b", "c"}), BackendError);
}

TEST_CASE("prompt generator prefers the request system prompt") {
  TestServer ts;
  json seen;
  ts.server.Post("/v1/chat/completions",
                 [&](const httplib::Request& req, httplib::Response& res) {
                   seen = json::parse(req.body);
                   res.set_content(
                       R"({"choices":[{"message":{"content":"RESULT: out"}}]})",
                       "application/json");
                 });
  GeneratorConfig config;
  config.endpoint = ts.endpoint();
  config.system_prompt = "configured system";
  config.retry.backoff_ms = 5;
  HttpPromptGenerator gen(config);

  GeneratorRequest request;
  request.system_prompt = "per-request system";
  request.user_prompt = "mutate this";
  gen.generate(request);
  CHECK(seen.at("messages").at(0).at("role") == "system");
  CHECK(seen.at("messages").at(0).at("content") == "per-request system");

  request.system_prompt.clear();
  gen.generate(request);
  CHECK(seen.at("messages").at(0).at("content") == "configured system");
}
