#pragma once

#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "toxsearch/backends.hpp"
#include "toxsearch/genome.hpp"
#include "toxsearch/pos_tagger.hpp"
#include "toxsearch/runlog.hpp"
#include "toxsearch/taxonomy.hpp"
#include "toxsearch/templates.hpp"

namespace toxsearch {

struct MaskedPrompt {
  std::string masked_text;  // contains [MASK_1] .. [MASK_m]
  std::vector<std::pair<size_t, std::string>> originals;  // (word index, word)
};

// Masks m distinct word positions with numbered tokens, left to right.
MaskedPrompt mask_words(const std::string& text, int m, std::mt19937_64& rng);
// Substitutes the originals back; exact inverse of mask_words.
std::string unmask(const MaskedPrompt& masked);
// Applies per-mask replacement words.
std::string apply_fills(const MaskedPrompt& masked,
                        const std::vector<std::string>& fills);

double cosine_similarity(std::span<const double> u, std::span<const double> v);

// Sentence-pairing crossover: embeds both parents' sentences, greedily
// pairs across parents by descending cosine (each sentence used once,
// pairs below `threshold` rejected), concatenates matched pairs in
// p1-order. nullopt = no pair above threshold (operator skip).
std::optional<std::string> semantic_similarity_crossover(
    const std::string& parent1, const std::string& parent2,
    EmbedderBackend& embedder, double threshold = 0.5);

struct OperatorContext {
  const TemplateSet* templates = nullptr;
  const Taxonomy* concepts = nullptr;
  const Taxonomy* styles = nullptr;
  const Taxonomy* typos = nullptr;
  const PosTagger* tagger = nullptr;
  std::string pivot_language = "Hindi";
  int mask_count = 1;
  double similarity_threshold = 0.5;
  int informed_exemplars = 10;
};

// Request builders. nullopt = operator-skip (nothing to transform).
std::optional<GeneratorRequest> build_lexical_request(OperatorKind kind,
                                                      const PromptGenome& parent,
                                                      const OperatorContext& ctx,
                                                      std::mt19937_64& rng);
GeneratorRequest build_mlm_request(const MaskedPrompt& masked,
                                   const OperatorContext& ctx);
GeneratorRequest build_negation_request(const PromptGenome& parent,
                                        const OperatorContext& ctx);
// Two chained requests; the second's source text is stage one's output.
std::pair<GeneratorRequest, GeneratorRequest> build_backtranslation_requests(
    const PromptGenome& parent, const OperatorContext& ctx);
std::pair<const TaxonomyCategory*, std::vector<std::string>> select_concept(
    const Taxonomy& taxonomy, std::mt19937_64& rng);
std::pair<std::string, std::string> select_style(const Taxonomy& taxonomy,
                                                 std::mt19937_64& rng);
GeneratorRequest build_concept_request(const PromptGenome& parent,
                                       const OperatorContext& ctx,
                                       std::mt19937_64& rng);
GeneratorRequest build_stylistic_request(const PromptGenome& parent,
                                         const OperatorContext& ctx,
                                         std::mt19937_64& rng);
GeneratorRequest inject_typos(const PromptGenome& parent,
                              const OperatorContext& ctx, std::mt19937_64& rng);
GeneratorRequest build_paraphrase_request(const PromptGenome& parent,
                                          const OperatorContext& ctx);
// Exemplars sorted descending by score, at most 10.
std::optional<GeneratorRequest> build_informed_request(
    const std::vector<PromptGenome>& elite_top, const OperatorContext& ctx);
GeneratorRequest build_fusion_request(const PromptGenome& p1,
                                      const PromptGenome& p2,
                                      const OperatorContext& ctx);

struct SpawnConfig {
  int generation = 0;
  std::string mode;
  bool fallback_sampling = false;
  std::uint64_t master_seed = 42;
  std::vector<OperatorKind> enabled = default_operator_set();
};

struct SpawnOutcome {
  std::vector<ChildRecord> records;    // one per attempt, plus skips
  std::vector<PromptGenome> children;  // scored valid children only
  int attempted = 0;
  int skipped = 0;
};

// One generation's child production: per parent, every enabled mutation
// kind; per unique parent pair, both crossover kinds. Valid children are
// scored once through responder + moderation.
SpawnOutcome spawn_children(const std::vector<PromptGenome>& parents,
                            const std::vector<PromptGenome>& elites_by_score,
                            const BackendSuite& backends,
                            const OperatorContext& ctx,
                            std::span<const std::string> refusal_patterns,
                            std::unordered_set<std::string>& existing_normalized,
                            std::uint64_t& next_id, const SpawnConfig& config);

}  // namespace toxsearch
