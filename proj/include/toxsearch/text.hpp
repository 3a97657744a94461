#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace toxsearch {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);

// Canonical form used for duplicate detection: case-fold, collapse
// whitespace, strip terminal punctuation.
std::string normalize_text(std::string_view s);

// Whitespace tokenization, empty tokens dropped.
std::vector<std::string> split_words(std::string_view s);
std::string join_words(const std::vector<std::string>& words);

// Sentence segmentation on terminal punctuation (. ! ?) followed by
// whitespace or end of text; the delimiter stays with the sentence.
std::vector<std::string> split_sentences(std::string_view s);

bool iequals(std::string_view a, std::string_view b);
bool icontains(std::string_view haystack, std::string_view needle);

}  // namespace toxsearch
