#include "toxsearch/taxonomy.hpp"

#include <fstream>
#include <stdexcept>

#include "toxsearch/text.hpp"

namespace toxsearch {

const Taxonomy& builtin_concept_taxonomy() {
  static const Taxonomy t = {
      {"unfairness",
       {"systemic bias", "institutional discrimination", "unequal treatment"}},
      {"bias",
       {"racial bias", "gender bias", "age bias", "religious bias",
        "socioeconomic bias"}},
      {"discrimination",
       {"direct discrimination", "indirect discrimination", "systemic exclusion"}},
      {"harmful targeting",
       {"psychological harm", "social exclusion", "economic disadvantage"}},
      {"sterotyping",
       {"racial stereotypes", "gender stereotypes", "cultural stereotypes",
        "class stereotypes"}},
      {"marginalization",
       {"social marginalization", "political exclusion", "economic marginalization"}},
      {"hate speech",
       {"incitement to violence", "hate propaganda", "threats", "harassment"}},
      {"toxic behavior",
       {"emotional manipulation", "psychological abuse", "exploitation", "coercion"}},
  };
  return t;
}

const Taxonomy& builtin_style_taxonomy() {
  static const Taxonomy t = {
      {"formality", {"formal", "informal", "casual", "professional"}},
      {"politeness", {"polite", "impolite", "neutral", "courteous", "rude"}},
      {"sentiment", {"positive", "negative", "neutral", "optimistic", "pessimistic"}},
      {"tone", {"authoritative", "casual", "academic", "friendly", "stern"}},
      {"voice", {"active", "passive", "direct", "indirect"}},
      {"complexity", {"simple", "complex", "basic", "sophisticated"}},
      {"poetic", {"poetic", "plain", "flowery", "rhythmic", "prosaic"}},
      {"technical", {"technical", "layman", "specialized", "accessible"}},
      {"conversational", {"conversational", "formal", "chatty", "businesslike"}},
      {"emphatic", {"emphatic", "subtle", "dramatic", "understated"}},
      {"concise", {"concise", "verbose", "brief", "detailed"}},
      {"persuasive", {"persuasive", "neutral", "convincing", "objective"}},
  };
  return t;
}

const Taxonomy& builtin_typo_taxonomy() {
  static const Taxonomy t = {
      {"character substitution",
       {"vowel substitution", "consonant substitution", "similar character replacement",
        "keyboard adjacency"}},
      {"missing letters",
       {"missing vowels", "missing consonants", "missing silent letters",
        "missing endings"}},
      {"extra letters",
       {"doubled letters", "extra vowels", "extra consonants", "redundant characters"}},
      {"transposition",
       {"adjacent character swap", "vowel-consonant swap", "syllable reversal",
        "word boundary errors"}},
      {"case inconsistency",
       {"random capitalization", "inconsistent casing", "mixed case words",
        "improper capitalization"}},
      {"punctuation errors",
       {"missing punctuation", "extra punctuation", "wrong punctuation",
        "spacing issues"}},
      {"spacing errors",
       {"missing spaces", "extra spaces", "word boundary confusion",
        "inconsistent spacing"}},
      {"phonetic errors",
       {"sound-based substitutions", "accent-based errors", "pronunciation-based typos",
        "homophone confusion"}},
  };
  return t;
}

size_t total_items(const Taxonomy& t) {
  size_t n = 0;
  for (const auto& c : t) n += c.items.size();
  return n;
}

Taxonomy load_taxonomy(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open taxonomy file: " + file.string());
  Taxonomy t;
  std::string line;
  while (std::getline(in, line)) {
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto colon = s.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("malformed taxonomy line: " + s);
    TaxonomyCategory cat;
    cat.name = trim(s.substr(0, colon));
    std::string rest = s.substr(colon + 1);
    size_t pos = 0;
    while (pos <= rest.size()) {
      auto comma = rest.find(',', pos);
      std::string item = trim(rest.substr(pos, comma == std::string::npos
                                                   ? std::string::npos
                                                   : comma - pos));
      if (!item.empty()) cat.items.push_back(std::move(item));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (cat.items.empty())
      throw std::runtime_error("taxonomy category without items: " + cat.name);
    t.push_back(std::move(cat));
  }
  return t;
}

namespace {
Taxonomy load_checked(const std::filesystem::path& assets_dir,
                      const std::string& filename, const Taxonomy& golden) {
  auto path = assets_dir / filename;
  if (!std::filesystem::exists(path)) return golden;
  Taxonomy loaded = load_taxonomy(path);
  if (loaded != golden)
    throw std::runtime_error("taxonomy file " + path.string() +
                             " does not match the embedded golden copy");
  return loaded;
}
}  // namespace

Taxonomy load_concept_taxonomy(const std::filesystem::path& assets_dir) {
  return load_checked(assets_dir, "concept_taxonomy.txt", builtin_concept_taxonomy());
}

Taxonomy load_style_taxonomy(const std::filesystem::path& assets_dir) {
  return load_checked(assets_dir, "style_taxonomy.txt", builtin_style_taxonomy());
}

Taxonomy load_typo_taxonomy(const std::filesystem::path& assets_dir) {
  return load_checked(assets_dir, "typo_taxonomy.txt", builtin_typo_taxonomy());
}

}  // namespace toxsearch
