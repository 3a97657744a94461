#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace toxsearch {

struct TaxonomyCategory {
  std::string name;
  std::vector<std::string> items;
  bool operator==(const TaxonomyCategory&) const = default;
};

using Taxonomy = std::vector<TaxonomyCategory>;

// Golden copies of the three operator taxonomies, embedded for integrity
// checks against the shipped asset files.
const Taxonomy& builtin_concept_taxonomy();  // 8 categories, 29 subtypes
const Taxonomy& builtin_style_taxonomy();    // 12 attributes
const Taxonomy& builtin_typo_taxonomy();     // 8 categories x 4 subtypes

size_t total_items(const Taxonomy& t);

// Asset format: one category per line, "name: item, item, ...". Blank
// lines and '#' comments ignored.
Taxonomy load_taxonomy(const std::filesystem::path& file);

// Loads from `dir` when the file exists, verifying it matches the embedded
// golden; throws on mismatch. Falls back to the golden when absent.
Taxonomy load_concept_taxonomy(const std::filesystem::path& assets_dir);
Taxonomy load_style_taxonomy(const std::filesystem::path& assets_dir);
Taxonomy load_typo_taxonomy(const std::filesystem::path& assets_dir);

}  // namespace toxsearch
