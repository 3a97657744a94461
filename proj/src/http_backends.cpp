#include "toxsearch/http_backends.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace toxsearch {

using nlohmann::json;

namespace {

// Splits "http://host:port/base" into client origin and path prefix.
struct SplitUrl {
  std::string origin;
  std::string prefix;
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  size_t path_start = url.find('/', scheme_end == std::string::npos
                                        ? 0
                                        : scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path_start);
  if (prefix == "/") prefix.clear();
  return {url.substr(0, path_start), prefix};
}

bool retryable_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

// POST with retry/backoff; throws BackendUnavailable when exhausted.
json post_json(const std::string& endpoint, const std::string& path,
               const json& body, const RetryPolicy& retry,
               const httplib::Headers& headers = {}) {
  auto [origin, prefix] = split_url(endpoint);
  std::string last_error;
  for (int attempt = 0; attempt < std::max(1, retry.max_attempts); ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(retry.backoff_ms * (1LL << (attempt - 1))));
    }
    httplib::Client client(origin);
    client.set_connection_timeout(10);
    client.set_read_timeout(120);
    auto res = client.Post(prefix + path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (retryable_status(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300)
      throw BackendError("HTTP " + std::to_string(res->status) + ": " + res->body);
    try {
      return json::parse(res->body);
    } catch (const json::exception& e) {
      throw BackendError(std::string("malformed JSON response: ") + e.what());
    }
  }
  throw BackendUnavailable(endpoint + path + " unavailable after " +
                           std::to_string(retry.max_attempts) +
                           " attempts (" + last_error + ")");
}

bool probe(const std::string& endpoint) {
  auto [origin, prefix] = split_url(endpoint);
  httplib::Client client(origin);
  client.set_connection_timeout(5);
  auto res = client.Get(prefix.empty() ? "/" : prefix);
  return static_cast<bool>(res);  // any HTTP answer counts as reachable
}

}  // namespace

json build_chat_request(const GeneratorConfig& config,
                        const std::vector<ChatMessage>& messages) {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return json{{"model", config.model},
              {"messages", msgs},
              {"temperature", config.temperature},
              {"max_tokens", config.max_tokens}};
}

std::string parse_chat_response(const json& response) {
  try {
    const auto& choices = response.at("choices");
    if (!choices.is_array() || choices.empty())
      throw BackendError("chat response has no choices");
    return choices.at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("unexpected chat response shape: ") + e.what());
  }
}

HttpChatClient::HttpChatClient(GeneratorConfig config, double requests_per_second)
    : config_(std::move(config)) {
  if (requests_per_second > 0.0)
    bucket_ = std::make_unique<TokenBucket>(requests_per_second, requests_per_second);
}

HttpChatClient::~HttpChatClient() = default;

std::string HttpChatClient::complete(const std::vector<ChatMessage>& messages) {
  if (bucket_) bucket_->acquire();
  json response = post_json(config_.endpoint, "/v1/chat/completions",
                            build_chat_request(config_, messages), config_.retry);
  return parse_chat_response(response);
}

bool HttpChatClient::reachable() { return probe(config_.endpoint); }

HttpPromptGenerator::HttpPromptGenerator(GeneratorConfig config,
                                         double requests_per_second)
    : client_(std::move(config), requests_per_second) {}

std::string HttpPromptGenerator::generate(const GeneratorRequest& request) {
  std::vector<ChatMessage> messages;
  std::string system = client_.config().system_prompt;
  if (!request.system_prompt.empty()) system = request.system_prompt;
  if (!system.empty()) messages.push_back({"system", system});
  messages.push_back({"user", request.user_prompt});
  return client_.complete(messages);
}

bool HttpPromptGenerator::healthy() { return client_.reachable(); }

HttpResponder::HttpResponder(GeneratorConfig config, double requests_per_second)
    : client_(std::move(config), requests_per_second) {}

std::string HttpResponder::respond(const std::string& prompt) {
  return client_.complete({{"user", prompt}});
}

bool HttpResponder::healthy() { return client_.reachable(); }

json build_analyze_request(const std::string& text) {
  return json{{"comment", {{"text", text}}},
              {"requestedAttributes",
               {{"TOXICITY", json::object()},
                {"SEVERE_TOXICITY", json::object()},
                {"INSULT", json::object()},
                {"IDENTITY_ATTACK", json::object()},
                {"THREAT", json::object()},
                {"PROFANITY", json::object()}}},
              {"doNotStore", true}};
}

ModerationScores parse_analyze_response(const json& response) {
  ModerationScores scores;
  try {
    for (const auto& [attr, node] : response.at("attributeScores").items()) {
      double v = node.at("summaryScore").at("value").get<double>();
      if (v < 0.0 || v > 1.0)
        throw BackendError("moderation score outside [0,1] for " + attr);
      scores.attributes[attr] = v;
    }
  } catch (const json::exception& e) {
    throw BackendError(std::string("unexpected AnalyzeComment response shape: ") +
                       e.what());
  }
  if (!scores.attributes.count("TOXICITY"))
    throw BackendError("AnalyzeComment response lacks TOXICITY");
  return scores;
}

HttpModerationClient::HttpModerationClient(ModerationConfig config,
                                           double requests_per_second)
    : config_(std::move(config)) {
  if (requests_per_second > 0.0)
    bucket_ = std::make_unique<TokenBucket>(requests_per_second, requests_per_second);
}

ModerationScores HttpModerationClient::moderate(const std::string& text) {
  if (bucket_) bucket_->acquire();
  std::string path = "/v1alpha1/comments:analyze";
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key && *key) path += std::string("?key=") + key;
  json response =
      post_json(config_.endpoint, path, build_analyze_request(text), config_.retry);
  return parse_analyze_response(response);
}

bool HttpModerationClient::healthy() { return probe(config_.endpoint); }

json build_embedding_request(const EmbedderConfig& config,
                             const std::vector<std::string>& inputs) {
  return json{{"model", config.model}, {"input", inputs}};
}

std::vector<std::vector<double>> parse_embedding_response(const json& response) {
  std::vector<std::vector<double>> out;
  try {
    for (const auto& item : response.at("data")) {
      out.push_back(item.at("embedding").get<std::vector<double>>());
    }
  } catch (const json::exception& e) {
    throw BackendError(std::string("unexpected embeddings response shape: ") +
                       e.what());
  }
  for (const auto& v : out) {
    if (v.size() != out.front().size())
      throw BackendError("embedding dimension mismatch within batch");
  }
  return out;
}

HttpEmbedder::HttpEmbedder(EmbedderConfig config, double requests_per_second)
    : config_(std::move(config)) {
  if (requests_per_second > 0.0)
    bucket_ = std::make_unique<TokenBucket>(requests_per_second, requests_per_second);
}

std::vector<std::vector<double>> HttpEmbedder::embed(
    const std::vector<std::string>& sentences) {
  if (bucket_) bucket_->acquire();
  json response = post_json(config_.endpoint, "/v1/embeddings",
                            build_embedding_request(config_, sentences),
                            config_.retry);
  auto vectors = parse_embedding_response(response);
  if (vectors.size() != sentences.size())
    throw BackendError("embeddings count does not match input count");
  for (auto& v : vectors) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0)
      for (double& x : v) x /= norm;
  }
  return vectors;
}

bool HttpEmbedder::healthy() { return probe(config_.endpoint); }

}  // namespace toxsearch
