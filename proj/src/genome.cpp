#include "toxsearch/genome.hpp"

namespace toxsearch {

int operator_arity(OperatorKind kind) { return is_crossover(kind) ? 2 : 1; }

bool is_crossover(OperatorKind kind) {
  return kind == OperatorKind::SemanticSimilarityCrossover ||
         kind == OperatorKind::SemanticFusionCrossover;
}

std::string_view operator_name(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::SynonymReplacement: return "synonym_replacement";
    case OperatorKind::AntonymReplacement: return "antonym_replacement";
    case OperatorKind::MlmSubstitution: return "mlm_substitution";
    case OperatorKind::Negation: return "negation";
    case OperatorKind::BackTranslation: return "back_translation";
    case OperatorKind::ConceptAddition: return "concept_addition";
    case OperatorKind::StylisticTransfer: return "stylistic_transfer";
    case OperatorKind::TypographicalErrors: return "typographical_errors";
    case OperatorKind::Paraphrasing: return "paraphrasing";
    case OperatorKind::InformedEvolution: return "informed_evolution";
    case OperatorKind::SemanticSimilarityCrossover: return "semantic_similarity_crossover";
    case OperatorKind::SemanticFusionCrossover: return "semantic_fusion_crossover";
  }
  return "unknown";
}

std::vector<OperatorKind> default_operator_set() {
  auto ops = all_operators();
  return {ops.begin(), ops.end()};
}

std::optional<OperatorKind> operator_from_name(std::string_view name) {
  for (OperatorKind k : all_operators()) {
    if (operator_name(k) == name) return k;
  }
  return std::nullopt;
}

}  // namespace toxsearch
