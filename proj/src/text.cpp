#include "toxsearch/text.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace toxsearch {

namespace {
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }
}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = false;
  for (char c : s) {
    if (is_space(c)) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

std::string normalize_text(std::string_view s) {
  std::string out = collapse_whitespace(to_lower(s));
  while (!out.empty()) {
    char c = out.back();
    if (c == '.' || c == '!' || c == '?' || c == ',' || c == ';' || c == ':') {
      out.pop_back();
    } else {
      break;
    }
  }
  return trim(out);
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : s) {
    if (is_space(c)) {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += words[i];
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view s) {
  std::vector<std::string> sentences;
  std::string cur;
  for (size_t i = 0; i < s.size(); ++i) {
    cur.push_back(s[i]);
    char c = s[i];
    if ((c == '.' || c == '!' || c == '?') &&
        (i + 1 == s.size() || is_space(s[i + 1]))) {
      std::string t = trim(cur);
      if (!t.empty()) sentences.push_back(std::move(t));
      cur.clear();
    }
  }
  std::string t = trim(cur);
  if (!t.empty()) sentences.push_back(std::move(t));
  return sentences;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(),
                    [](char x, char y) { return lower(x) == lower(y); });
}

bool icontains(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return true;
  if (needle.size() > haystack.size()) return false;
  std::string h = to_lower(haystack), n = to_lower(needle);
  return h.find(n) != std::string::npos;
}

}  // namespace toxsearch
