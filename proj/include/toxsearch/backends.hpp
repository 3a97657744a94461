#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "toxsearch/genome.hpp"

namespace toxsearch {

struct BackendError : std::runtime_error {
  explicit BackendError(const std::string& what) : std::runtime_error(what) {}
};

// Raised after the retry budget is exhausted.
struct BackendUnavailable : BackendError {
  explicit BackendUnavailable(const std::string& what) : BackendError(what) {}
};

struct RetryPolicy {
  int max_attempts = 3;
  int backoff_ms = 250;  // doubled per attempt
};

struct GeneratorConfig {
  std::string endpoint;      // base URL, e.g. http://localhost:8080
  std::string model;
  double temperature = 0.9;  // 0.9 PG / 0.7 RG
  int max_context = 2048;
  int max_tokens = 256;
  std::string system_prompt; // PG only; RG runs without system conditioning
  RetryPolicy retry;
};

struct ModerationScores {
  std::map<std::string, double> attributes;  // attribute -> score in [0,1]

  double toxicity() const {
    auto it = attributes.find("TOXICITY");
    if (it == attributes.end())
      throw std::runtime_error("ModerationScores: TOXICITY attribute missing");
    return it->second;
  }
};

struct ChatMessage {
  std::string role;
  std::string content;
};

// One structured instruction to the prompt generator. HTTP backends only
// look at the prompt fields; simulators may additionally use the operator
// kind, purpose, source texts, and the per-child rng draw.
struct GeneratorRequest {
  OperatorKind op = OperatorKind::Paraphrasing;
  std::string purpose;  // "mutate", "mlm", "translate_forward", "translate_back", ...
  std::string system_prompt;
  std::string user_prompt;
  std::vector<std::string> source_texts;
  std::uint64_t rng_draw = 0;
};

class PromptGeneratorBackend {
 public:
  virtual ~PromptGeneratorBackend() = default;
  virtual std::string generate(const GeneratorRequest& request) = 0;
  virtual bool healthy() { return true; }
  virtual std::string name() const = 0;
};

class ResponderBackend {
 public:
  virtual ~ResponderBackend() = default;
  virtual std::string respond(const std::string& prompt) = 0;
  virtual bool healthy() { return true; }
  virtual std::string name() const = 0;
};

class ModerationBackend {
 public:
  virtual ~ModerationBackend() = default;
  virtual ModerationScores moderate(const std::string& text) = 0;
  virtual bool healthy() { return true; }
  virtual std::string name() const = 0;
};

class EmbedderBackend {
 public:
  virtual ~EmbedderBackend() = default;
  // One L2-normalized vector per sentence, all the same dimension.
  virtual std::vector<std::vector<double>> embed(
      const std::vector<std::string>& sentences) = 0;
  virtual bool healthy() { return true; }
  virtual std::string name() const = 0;
};

struct BackendSuite {
  std::shared_ptr<PromptGeneratorBackend> prompt_generator;
  std::shared_ptr<ResponderBackend> responder;
  std::shared_ptr<ModerationBackend> moderation;
  std::shared_ptr<EmbedderBackend> embedder;
};

// Simple token bucket for per-backend request pacing. requests_per_second
// <= 0 disables pacing.
class TokenBucket {
 public:
  TokenBucket(double requests_per_second, double burst);
  void acquire();  // blocks until a token is available

 private:
  double rate_;
  double capacity_;
  double tokens_;
  std::int64_t last_refill_us_;
};

}  // namespace toxsearch
