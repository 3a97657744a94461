#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace toxsearch {

// The 12 variation operators: ten mutations (arity 1) followed by two
// crossovers (arity 2).
enum class OperatorKind {
  SynonymReplacement,
  AntonymReplacement,
  MlmSubstitution,
  Negation,
  BackTranslation,
  ConceptAddition,
  StylisticTransfer,
  TypographicalErrors,
  Paraphrasing,
  InformedEvolution,
  SemanticSimilarityCrossover,
  SemanticFusionCrossover,
};

constexpr int kOperatorCount = 12;
constexpr int kMutationOperatorCount = 10;
constexpr int kCrossoverOperatorCount = 2;

std::vector<OperatorKind> default_operator_set();

constexpr std::array<OperatorKind, kOperatorCount> all_operators() {
  return {OperatorKind::SynonymReplacement,
          OperatorKind::AntonymReplacement,
          OperatorKind::MlmSubstitution,
          OperatorKind::Negation,
          OperatorKind::BackTranslation,
          OperatorKind::ConceptAddition,
          OperatorKind::StylisticTransfer,
          OperatorKind::TypographicalErrors,
          OperatorKind::Paraphrasing,
          OperatorKind::InformedEvolution,
          OperatorKind::SemanticSimilarityCrossover,
          OperatorKind::SemanticFusionCrossover};
}

int operator_arity(OperatorKind kind);
bool is_crossover(OperatorKind kind);
std::string_view operator_name(OperatorKind kind);
std::optional<OperatorKind> operator_from_name(std::string_view name);

inline constexpr std::string_view kSeedOperatorName = "seed";

// One candidate prompt in the population.
struct PromptGenome {
  std::uint64_t id = 0;
  std::string text;
  double toxicity = 0.0;
  int generation_born = 0;
  std::string op = std::string(kSeedOperatorName);  // operator name or "seed"
  std::vector<std::uint64_t> parent_ids;            // 0 seeds, 1 mutations, 2 crossovers
  double parent_baseline = 0.0;
  bool valid = true;
};

}  // namespace toxsearch
