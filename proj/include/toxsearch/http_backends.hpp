#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "toxsearch/backends.hpp"

namespace toxsearch {

// ---- OpenAI-compatible chat completions ----

nlohmann::json build_chat_request(const GeneratorConfig& config,
                                  const std::vector<ChatMessage>& messages);
std::string parse_chat_response(const nlohmann::json& response);

// POSTs {endpoint}/v1/chat/completions with retry + exponential backoff;
// retries transport errors, 429 and 5xx.
class HttpChatClient {
 public:
  HttpChatClient(GeneratorConfig config, double requests_per_second = 0.0);
  ~HttpChatClient();

  std::string complete(const std::vector<ChatMessage>& messages);
  bool reachable();
  const GeneratorConfig& config() const { return config_; }

 private:
  GeneratorConfig config_;
  std::unique_ptr<TokenBucket> bucket_;
};

class HttpPromptGenerator : public PromptGeneratorBackend {
 public:
  explicit HttpPromptGenerator(GeneratorConfig config,
                               double requests_per_second = 0.0);
  std::string generate(const GeneratorRequest& request) override;
  bool healthy() override;
  std::string name() const override { return "http-prompt-generator"; }

 private:
  HttpChatClient client_;
};

// Response generator: plain user message, no system conditioning.
class HttpResponder : public ResponderBackend {
 public:
  explicit HttpResponder(GeneratorConfig config, double requests_per_second = 0.0);
  std::string respond(const std::string& prompt) override;
  bool healthy() override;
  std::string name() const override { return "http-responder"; }

 private:
  HttpChatClient client_;
};

// ---- Perspective-style AnalyzeComment moderation ----

nlohmann::json build_analyze_request(const std::string& text);
ModerationScores parse_analyze_response(const nlohmann::json& response);

struct ModerationConfig {
  std::string endpoint;       // e.g. https://commentanalyzer.googleapis.com
  std::string api_key_env = "PERSPECTIVE_API_KEY";
  RetryPolicy retry;
};

class HttpModerationClient : public ModerationBackend {
 public:
  explicit HttpModerationClient(ModerationConfig config,
                                double requests_per_second = 0.0);
  ModerationScores moderate(const std::string& text) override;
  bool healthy() override;
  std::string name() const override { return "http-moderation"; }

 private:
  ModerationConfig config_;
  std::unique_ptr<TokenBucket> bucket_;
};

// ---- Embeddings over an OpenAI-compatible /v1/embeddings endpoint ----

struct EmbedderConfig {
  std::string endpoint;
  std::string model = "all-MiniLM-L6-v2";
  RetryPolicy retry;
};

nlohmann::json build_embedding_request(const EmbedderConfig& config,
                                       const std::vector<std::string>& inputs);
std::vector<std::vector<double>> parse_embedding_response(const nlohmann::json& response);

class HttpEmbedder : public EmbedderBackend {
 public:
  explicit HttpEmbedder(EmbedderConfig config, double requests_per_second = 0.0);
  std::vector<std::vector<double>> embed(
      const std::vector<std::string>& sentences) override;
  bool healthy() override;
  std::string name() const override { return "http-embedder"; }

 private:
  EmbedderConfig config_;
  std::unique_ptr<TokenBucket> bucket_;
};

}  // namespace toxsearch
