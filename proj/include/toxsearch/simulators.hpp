#pragma once

#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "toxsearch/backends.hpp"

namespace toxsearch {

// Ordered response queues keyed by operator kind, with a shared default
// queue; the fixture format for deterministic end-to-end tests.
class ScriptedGenerator : public PromptGeneratorBackend {
 public:
  void enqueue(OperatorKind kind, std::string response);
  void enqueue_default(std::string response);

  std::string generate(const GeneratorRequest& request) override;
  std::string name() const override { return "scripted-generator"; }

 private:
  std::map<OperatorKind, std::deque<std::string>> queues_;
  std::deque<std::string> default_queue_;
  std::mutex mu_;
};

// Deterministic stand-in for the prompt generator: perturbs the request's
// source text (replace / insert / swap words, drawing inserts from a
// vocabulary) as a pure function of (seed, request.rng_draw). Never
// refuses and always emits the sentinel, so simulated runs have IR = 0.
class PerturbingGenerator : public PromptGeneratorBackend {
 public:
  PerturbingGenerator(std::uint64_t seed, std::vector<std::string> vocabulary);

  std::string generate(const GeneratorRequest& request) override;
  std::string name() const override { return "perturbing-generator"; }

 private:
  std::uint64_t seed_;
  std::vector<std::string> vocabulary_;
};

// Returns the prompt verbatim, so the moderation score of a response
// equals the score of the prompt itself.
class EchoResponder : public ResponderBackend {
 public:
  std::string respond(const std::string& prompt) override { return prompt; }
  std::string name() const override { return "echo-responder"; }
};

// Desk-scale moderation oracle: case-insensitive whole-word matching
// against a weighted lexicon, scored s = H / (H + 1) over the summed
// matched weights. Bounded, deterministic, and monotone in matches.
class LexiconModeration : public ModerationBackend {
 public:
  explicit LexiconModeration(std::map<std::string, double> term_weights);

  ModerationScores moderate(const std::string& text) override;
  std::string name() const override { return "lexicon-moderation"; }

  double matched_weight(const std::string& text) const;

 private:
  std::map<std::string, double> weights_;  // keys lower-cased
};

// Deterministic bag-of-words hashing embedder (FNV-1a token hashing into
// a fixed dimension, signed buckets, L2 normalized).
class HashEmbedder : public EmbedderBackend {
 public:
  explicit HashEmbedder(size_t dim = 64);

  std::vector<std::vector<double>> embed(
      const std::vector<std::string>& sentences) override;
  std::string name() const override { return "hash-embedder"; }

 private:
  size_t dim_;
};

}  // namespace toxsearch
