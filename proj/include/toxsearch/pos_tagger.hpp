#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace toxsearch {

// The six open-class tags targeted by the lexical operators.
enum class PosTag { Noun, Verb, Adjective, Adverb, ProperNoun, Interjection };

std::string_view pos_tag_name(PosTag t);

// Pluggable tagger interface; returns nullopt for closed-class words.
class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::optional<PosTag> tag(std::string_view word, size_t position) const = 0;
};

// Deterministic rule-based tagger: closed-class stoplist, a small lexicon
// of common words, suffix heuristics, capitalization for proper nouns.
// Stands in for a full NLP pipeline behind the same interface.
class RuleBasedTagger : public PosTagger {
 public:
  std::optional<PosTag> tag(std::string_view word, size_t position) const override;
};

// Open-class words of `text` with their tags, in order. Throws on empty
// text; an empty result is the operator-skip signal.
std::vector<std::pair<std::string, PosTag>> pos_candidates(
    std::string_view text, const PosTagger& tagger);

}  // namespace toxsearch
