#include "toxsearch/simulators.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include "toxsearch/rng.hpp"
#include "toxsearch/text.hpp"
#include "toxsearch/validity.hpp"

namespace toxsearch {

void ScriptedGenerator::enqueue(OperatorKind kind, std::string response) {
  std::lock_guard<std::mutex> lock(mu_);
  queues_[kind].push_back(std::move(response));
}

void ScriptedGenerator::enqueue_default(std::string response) {
  std::lock_guard<std::mutex> lock(mu_);
  default_queue_.push_back(std::move(response));
}

std::string ScriptedGenerator::generate(const GeneratorRequest& request) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = queues_.find(request.op);
  if (it != queues_.end() && !it->second.empty()) {
    std::string r = std::move(it->second.front());
    it->second.pop_front();
    return r;
  }
  if (!default_queue_.empty()) {
    std::string r = std::move(default_queue_.front());
    default_queue_.pop_front();
    return r;
  }
  throw BackendUnavailable("scripted generator: response queue exhausted");
}

PerturbingGenerator::PerturbingGenerator(std::uint64_t seed,
                                         std::vector<std::string> vocabulary)
    : seed_(seed), vocabulary_(std::move(vocabulary)) {
  if (vocabulary_.empty())
    throw std::invalid_argument("PerturbingGenerator: vocabulary is empty");
}

namespace {

std::string ensure_question(std::string text) {
  std::string t = trim(text);
  if (t.empty()) t = "why?";
  if (t.back() != '?') t.push_back('?');
  return t;
}

size_t count_masks(const std::string& s) {
  size_t n = 0, pos = 0;
  while ((pos = s.find("[MASK_", pos)) != std::string::npos) {
    ++n;
    pos += 6;
  }
  return n;
}

std::string perturb(const std::string& source,
                    const std::vector<std::string>& vocab,
                    std::mt19937_64& rng) {
  auto words = split_words(source);
  if (words.empty()) words.push_back("why");
  const std::string& pick = vocab[uniform_index(rng, vocab.size())];
  double roll = uniform_real(rng);
  if (roll < 0.5) {
    // replace a word, keeping the first (interrogative) slot intact
    size_t lo = words.size() > 1 ? 1 : 0;
    size_t i = lo + uniform_index(rng, words.size() - lo);
    words[i] = pick;
  } else if (roll < 0.8) {
    size_t i = 1 + uniform_index(rng, words.size());
    words.insert(words.begin() + std::min(i, words.size()), pick);
  } else if (words.size() > 2) {
    size_t i = 1 + uniform_index(rng, words.size() - 2);
    std::swap(words[i], words[i + 1]);
  } else {
    words.push_back(pick);
  }
  return ensure_question(join_words(words));
}

}  // namespace

std::string PerturbingGenerator::generate(const GeneratorRequest& request) {
  std::mt19937_64 rng = substream(seed_, request.rng_draw, 0x7065727475ULL);
  const std::string source =
      request.source_texts.empty() ? std::string("why?") : request.source_texts[0];

  if (request.purpose == "mlm") {
    size_t masks = count_masks(source);
    std::string fills;
    for (size_t i = 0; i < masks; ++i) {
      if (i) fills += " | ";
      fills += vocabulary_[uniform_index(rng, vocabulary_.size())];
    }
    return std::string(kResultSentinel) + " " + fills;
  }
  if (request.purpose == "translate_forward") {
    // stand-in pivot text: reversed word order
    auto words = split_words(source);
    std::string rev;
    for (auto it = words.rbegin(); it != words.rend(); ++it) {
      if (!rev.empty()) rev.push_back(' ');
      rev += *it;
    }
    return std::string(kResultSentinel) + " " + rev;
  }
  if (request.purpose == "translate_back") {
    auto words = split_words(source);
    std::string fwd;
    for (auto it = words.rbegin(); it != words.rend(); ++it) {
      if (!fwd.empty()) fwd.push_back(' ');
      fwd += *it;
    }
    return std::string(kResultSentinel) + " " + perturb(fwd, vocabulary_, rng);
  }
  if (request.purpose == "fuse" && request.source_texts.size() >= 2) {
    auto a = split_words(request.source_texts[0]);
    auto b = split_words(request.source_texts[1]);
    std::vector<std::string> merged(a.begin(), a.begin() + (a.size() + 1) / 2);
    merged.insert(merged.end(), b.begin() + b.size() / 2, b.end());
    std::string fused = ensure_question(join_words(merged));
    return std::string(kResultSentinel) + " " + perturb(fused, vocabulary_, rng);
  }
  return std::string(kResultSentinel) + " " + perturb(source, vocabulary_, rng);
}

LexiconModeration::LexiconModeration(std::map<std::string, double> term_weights) {
  for (auto& [term, w] : term_weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("LexiconModeration: weights must be finite and >= 0");
    weights_[to_lower(term)] = w;
  }
}

double LexiconModeration::matched_weight(const std::string& text) const {
  double total = 0.0;
  for (const auto& raw : split_words(to_lower(text))) {
    // strip surrounding punctuation for whole-word matching
    size_t b = 0, e = raw.size();
    while (b < e && !std::isalnum(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && !std::isalnum(static_cast<unsigned char>(raw[e - 1]))) --e;
    auto it = weights_.find(raw.substr(b, e - b));
    if (it != weights_.end()) total += it->second;
  }
  return total;
}

ModerationScores LexiconModeration::moderate(const std::string& text) {
  const double h = matched_weight(text);
  ModerationScores scores;
  scores.attributes["TOXICITY"] = h / (h + 1.0);
  return scores;
}

HashEmbedder::HashEmbedder(size_t dim) : dim_(dim) {
  if (dim_ == 0) throw std::invalid_argument("HashEmbedder: dim must be > 0");
}

namespace {
std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}
}  // namespace

std::vector<std::vector<double>> HashEmbedder::embed(
    const std::vector<std::string>& sentences) {
  if (sentences.empty())
    throw std::invalid_argument("HashEmbedder: no sentences given");
  std::vector<std::vector<double>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    std::vector<double> v(dim_, 0.0);
    std::string token;
    auto flush = [&] {
      if (token.empty()) return;
      std::uint64_t h = fnv1a(token);
      v[h % dim_] += ((h >> 32) & 1) ? 1.0 : -1.0;
      token.clear();
    };
    for (char c : to_lower(s)) {
      if (std::isalnum(static_cast<unsigned char>(c)))
        token.push_back(c);
      else
        flush();
    }
    flush();
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      v[0] = 1.0;
    } else {
      for (double& x : v) x /= norm;
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace toxsearch
