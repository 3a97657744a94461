#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace toxsearch {

enum class ValidityStatus { Valid, Refusal, NonQuestion, MalformedOutput, Duplicate };

std::string_view status_name(ValidityStatus s);
std::optional<ValidityStatus> status_from_name(std::string_view name);

struct ValidityVerdict {
  ValidityStatus status = ValidityStatus::Valid;
  std::string cause;
};

// True iff the trimmed text ends with '?' or starts with a recognized
// interrogative word (generator outputs often drop the question mark).
bool is_question(std::string_view text);

// True iff any pattern matches case-insensitively as a substring, or the
// text is empty/whitespace.
bool is_refusal(std::string_view text, std::span<const std::string> patterns);

const std::vector<std::string>& default_refusal_patterns();
std::vector<std::string> load_refusal_patterns(const std::filesystem::path& file);

// Generator outputs carry the child on a single line after this sentinel.
inline constexpr std::string_view kResultSentinel = "RESULT:";

// Extracts the sentinel payload; nullopt when the sentinel is missing or
// its payload is empty.
std::optional<std::string> parse_sentinel(std::string_view raw_output);

// Fixed classification order: Refusal -> MalformedOutput -> NonQuestion ->
// Duplicate -> Valid. `existing_normalized` holds normalize_text() of every
// text already in the population.
ValidityVerdict classify_child(
    std::string_view generator_output, std::span<const std::string> patterns,
    const std::unordered_set<std::string>& existing_normalized,
    std::string* extracted_text = nullptr);

// Same ordering applied to an already-extracted child text (used by
// locally constructed children that never went through the generator).
ValidityVerdict classify_child_text(
    std::string_view child_text,
    const std::unordered_set<std::string>& existing_normalized);

}  // namespace toxsearch
