#include "toxsearch/pos_tagger.hpp"

#include <cctype>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "toxsearch/text.hpp"

namespace toxsearch {

std::string_view pos_tag_name(PosTag t) {
  switch (t) {
    case PosTag::Noun: return "noun";
    case PosTag::Verb: return "verb";
    case PosTag::Adjective: return "adjective";
    case PosTag::Adverb: return "adverb";
    case PosTag::ProperNoun: return "proper_noun";
    case PosTag::Interjection: return "interjection";
  }
  return "unknown";
}

namespace {

const std::unordered_set<std::string>& closed_class() {
  static const std::unordered_set<std::string> words = {
      // determiners / articles
      "the", "a", "an", "this", "that", "these", "those", "each", "every",
      "some", "any", "no", "all", "both", "either", "neither", "such",
      // pronouns
      "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us",
      "them", "my", "your", "his", "its", "our", "their", "mine", "yours",
      "theirs", "myself", "yourself", "himself", "herself", "itself",
      "ourselves", "themselves", "who", "whom", "whose", "which", "what",
      "something", "anything", "nothing", "everything", "someone", "anyone",
      "everyone", "nobody",
      // prepositions
      "of", "in", "on", "at", "by", "for", "with", "about", "against",
      "between", "into", "through", "during", "before", "after", "above",
      "below", "to", "from", "up", "down", "out", "off", "over", "under",
      "again", "toward", "towards", "upon", "without", "within", "among",
      // conjunctions
      "and", "or", "but", "nor", "so", "yet", "if", "because", "while",
      "although", "though", "unless", "until", "since", "whether", "than",
      "as", "then",
      // auxiliaries / modals / copulas
      "am", "is", "are", "was", "were", "be", "been", "being", "do", "does",
      "did", "have", "has", "had", "will", "would", "shall", "should", "can",
      "could", "may", "might", "must", "ought",
      // question words and particles
      "how", "why", "when", "where", "not", "there", "here", "also", "too",
      "very", "just", "only", "even", "still", "now",
  };
  return words;
}

const std::unordered_map<std::string, PosTag>& lexicon() {
  static const std::unordered_map<std::string, PosTag> lex = {
      {"people", PosTag::Noun},     {"person", PosTag::Noun},
      {"man", PosTag::Noun},        {"woman", PosTag::Noun},
      {"men", PosTag::Noun},        {"women", PosTag::Noun},
      {"child", PosTag::Noun},      {"children", PosTag::Noun},
      {"friend", PosTag::Noun},     {"neighbor", PosTag::Noun},
      {"group", PosTag::Noun},      {"world", PosTag::Noun},
      {"money", PosTag::Noun},      {"life", PosTag::Noun},
      {"way", PosTag::Noun},        {"thing", PosTag::Noun},
      {"things", PosTag::Noun},     {"time", PosTag::Noun},
      {"someone", PosTag::Noun},    {"question", PosTag::Noun},
      {"taxes", PosTag::Noun},      {"work", PosTag::Noun},
      {"home", PosTag::Noun},       {"school", PosTag::Noun},
      {"family", PosTag::Noun},     {"society", PosTag::Noun},
      {"lie", PosTag::Verb},        {"lies", PosTag::Verb},
      {"cheat", PosTag::Verb},      {"steal", PosTag::Verb},
      {"hurt", PosTag::Verb},       {"harm", PosTag::Verb},
      {"hate", PosTag::Verb},       {"trust", PosTag::Verb},
      {"think", PosTag::Verb},      {"believe", PosTag::Verb},
      {"make", PosTag::Verb},       {"get", PosTag::Verb},
      {"take", PosTag::Verb},       {"give", PosTag::Verb},
      {"say", PosTag::Verb},        {"tell", PosTag::Verb},
      {"upset", PosTag::Verb},      {"insult", PosTag::Verb},
      {"avoid", PosTag::Verb},      {"treat", PosTag::Verb},
      {"feel", PosTag::Verb},       {"act", PosTag::Verb},
      {"go", PosTag::Verb},         {"know", PosTag::Verb},
      {"want", PosTag::Verb},       {"need", PosTag::Verb},
      {"use", PosTag::Verb},        {"ignore", PosTag::Verb},
      {"good", PosTag::Adjective},  {"bad", PosTag::Adjective},
      {"wrong", PosTag::Adjective}, {"right", PosTag::Adjective},
      {"mean", PosTag::Adjective},  {"rude", PosTag::Adjective},
      {"unfair", PosTag::Adjective},{"poor", PosTag::Adjective},
      {"rich", PosTag::Adjective},  {"stupid", PosTag::Adjective},
      {"smart", PosTag::Adjective}, {"old", PosTag::Adjective},
      {"young", PosTag::Adjective}, {"different", PosTag::Adjective},
      {"better", PosTag::Adjective},{"worse", PosTag::Adjective},
      {"always", PosTag::Adverb},   {"never", PosTag::Adverb},
      {"often", PosTag::Adverb},    {"sometimes", PosTag::Adverb},
      {"really", PosTag::Adverb},   {"secretly", PosTag::Adverb},
      {"wow", PosTag::Interjection},{"hey", PosTag::Interjection},
      {"ouch", PosTag::Interjection},{"oh", PosTag::Interjection},
      {"alas", PosTag::Interjection},{"ugh", PosTag::Interjection},
  };
  return lex;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string strip_token(std::string_view word) {
  size_t b = 0, e = word.size();
  auto is_word_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || c == '-';
  };
  while (b < e && !is_word_char(word[b])) ++b;
  while (e > b && !is_word_char(word[e - 1])) --e;
  return std::string(word.substr(b, e - b));
}

}  // namespace

std::optional<PosTag> RuleBasedTagger::tag(std::string_view word,
                                           size_t position) const {
  std::string raw = strip_token(word);
  if (raw.empty()) return std::nullopt;
  std::string w = to_lower(raw);
  if (closed_class().count(w)) return std::nullopt;

  auto it = lexicon().find(w);
  if (it != lexicon().end()) return it->second;

  // capitalized off sentence start: proper noun
  if (position > 0 && std::isupper(static_cast<unsigned char>(raw[0])))
    return PosTag::ProperNoun;

  if (ends_with(w, "ly")) return PosTag::Adverb;
  if (ends_with(w, "ing") || ends_with(w, "ize") || ends_with(w, "ise") ||
      ends_with(w, "ify"))
    return PosTag::Verb;
  if (ends_with(w, "ous") || ends_with(w, "ful") || ends_with(w, "ive") ||
      ends_with(w, "able") || ends_with(w, "ible") || ends_with(w, "al") ||
      ends_with(w, "ish"))
    return PosTag::Adjective;
  if (ends_with(w, "tion") || ends_with(w, "ness") || ends_with(w, "ment") ||
      ends_with(w, "ity") || ends_with(w, "ism") || ends_with(w, "ers") ||
      ends_with(w, "er"))
    return PosTag::Noun;
  return PosTag::Noun;
}

std::vector<std::pair<std::string, PosTag>> pos_candidates(
    std::string_view text, const PosTagger& tagger) {
  if (trim(text).empty())
    throw std::invalid_argument("pos_candidates: empty text");
  std::vector<std::pair<std::string, PosTag>> out;
  auto words = split_words(text);
  for (size_t i = 0; i < words.size(); ++i) {
    std::string token = strip_token(words[i]);
    if (token.empty()) continue;
    if (auto t = tagger.tag(words[i], i)) out.emplace_back(token, *t);
  }
  return out;
}

}  // namespace toxsearch
