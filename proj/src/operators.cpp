#include "toxsearch/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "toxsearch/rng.hpp"
#include "toxsearch/text.hpp"
#include "toxsearch/validity.hpp"

namespace toxsearch {

MaskedPrompt mask_words(const std::string& text, int m, std::mt19937_64& rng) {
  auto words = split_words(text);
  if (m < 0) throw std::invalid_argument("mask_words: m must be >= 0");
  if (static_cast<size_t>(m) > words.size())
    throw std::invalid_argument("mask_words: m exceeds word count");
  MaskedPrompt out;
  if (m == 0) {
    out.masked_text = join_words(words);
    return out;
  }
  std::vector<size_t> idx(words.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (int k = 0; k < m; ++k) {
    size_t j = k + uniform_index(rng, idx.size() - k);
    std::swap(idx[k], idx[j]);
  }
  std::vector<size_t> chosen(idx.begin(), idx.begin() + m);
  std::sort(chosen.begin(), chosen.end());
  for (size_t k = 0; k < chosen.size(); ++k) {
    out.originals.emplace_back(chosen[k], words[chosen[k]]);
    words[chosen[k]] = "[MASK_" + std::to_string(k + 1) + "]";
  }
  out.masked_text = join_words(words);
  return out;
}

std::string unmask(const MaskedPrompt& masked) {
  auto words = split_words(masked.masked_text);
  for (size_t k = 0; k < masked.originals.size(); ++k) {
    const auto& [pos, original] = masked.originals[k];
    if (pos < words.size()) words[pos] = original;
  }
  return join_words(words);
}

std::string apply_fills(const MaskedPrompt& masked,
                        const std::vector<std::string>& fills) {
  if (fills.size() != masked.originals.size())
    throw std::invalid_argument("apply_fills: fill count does not match mask count");
  auto words = split_words(masked.masked_text);
  for (size_t k = 0; k < masked.originals.size(); ++k) {
    words[masked.originals[k].first] = fills[k];
  }
  return join_words(words);
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw std::invalid_argument("cosine_similarity: dimension mismatch");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0)
    throw std::invalid_argument("cosine_similarity: zero vector");
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

std::optional<std::string> semantic_similarity_crossover(
    const std::string& parent1, const std::string& parent2,
    EmbedderBackend& embedder, double threshold) {
  auto s1 = split_sentences(parent1);
  auto s2 = split_sentences(parent2);
  if (s1.empty() || s2.empty())
    throw std::invalid_argument("semantic_similarity_crossover: unsegmentable parent");

  std::vector<std::string> batch = s1;
  batch.insert(batch.end(), s2.begin(), s2.end());
  auto vectors = embedder.embed(batch);

  struct Pair {
    size_t i, j;
    double sim;
  };
  std::vector<Pair> pairs;
  for (size_t i = 0; i < s1.size(); ++i) {
    for (size_t j = 0; j < s2.size(); ++j) {
      double sim = cosine_similarity(vectors[i], vectors[s1.size() + j]);
      if (sim >= threshold) pairs.push_back({i, j, sim});
    }
  }
  if (pairs.empty()) return std::nullopt;

  // greedy by descending similarity, each sentence used at most once;
  // ties broken by index for determinism
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  std::vector<bool> used1(s1.size(), false), used2(s2.size(), false);
  std::vector<Pair> matched;
  for (const auto& p : pairs) {
    if (used1[p.i] || used2[p.j]) continue;
    used1[p.i] = used2[p.j] = true;
    matched.push_back(p);
  }
  std::sort(matched.begin(), matched.end(),
            [](const Pair& a, const Pair& b) { return a.i < b.i; });

  std::string child;
  for (const auto& p : matched) {
    if (!child.empty()) child.push_back(' ');
    child += s1[p.i];
    // many-to-many dedup: drop the p2 side when it repeats the p1 side
    if (normalize_text(s1[p.i]) != normalize_text(s2[p.j])) {
      child.push_back(' ');
      child += s2[p.j];
    }
  }
  return child;
}

namespace {

GeneratorRequest base_request(OperatorKind kind, std::string purpose,
                              const OperatorContext& ctx) {
  GeneratorRequest req;
  req.op = kind;
  req.purpose = std::move(purpose);
  req.system_prompt = ctx.templates->get("pg_system");
  return req;
}

}  // namespace

std::optional<GeneratorRequest> build_lexical_request(OperatorKind kind,
                                                      const PromptGenome& parent,
                                                      const OperatorContext& ctx,
                                                      std::mt19937_64& rng) {
  auto candidates = pos_candidates(parent.text, *ctx.tagger);
  if (candidates.empty()) return std::nullopt;
  const auto& [word, tag] = candidates[uniform_index(rng, candidates.size())];
  GeneratorRequest req = base_request(kind, "mutate", ctx);
  const std::string tpl =
      kind == OperatorKind::SynonymReplacement ? "synonym" : "antonym";
  req.user_prompt = render_template(
      ctx.templates->get(tpl),
      {{"word", word}, {"tag", std::string(pos_tag_name(tag))}, {"parent", parent.text}});
  req.source_texts = {parent.text};
  return req;
}

GeneratorRequest build_mlm_request(const MaskedPrompt& masked,
                                   const OperatorContext& ctx) {
  if (masked.originals.empty())
    throw std::invalid_argument("build_mlm_request: no masks");
  std::string originals;
  for (size_t k = 0; k < masked.originals.size(); ++k) {
    if (k) originals += ", ";
    originals += "[MASK_" + std::to_string(k + 1) + "] was \"" +
                 masked.originals[k].second + "\"";
  }
  GeneratorRequest req = base_request(OperatorKind::MlmSubstitution, "mlm", ctx);
  req.user_prompt = render_template(
      ctx.templates->get("mlm"),
      {{"masked", masked.masked_text},
       {"originals", originals},
       {"mask_count", std::to_string(masked.originals.size())}});
  req.source_texts = {masked.masked_text};
  return req;
}

GeneratorRequest build_negation_request(const PromptGenome& parent,
                                        const OperatorContext& ctx) {
  if (trim(parent.text).empty())
    throw std::invalid_argument("build_negation_request: empty parent");
  GeneratorRequest req = base_request(OperatorKind::Negation, "mutate", ctx);
  req.user_prompt =
      render_template(ctx.templates->get("negation"), {{"parent", parent.text}});
  req.source_texts = {parent.text};
  return req;
}

std::pair<GeneratorRequest, GeneratorRequest> build_backtranslation_requests(
    const PromptGenome& parent, const OperatorContext& ctx) {
  GeneratorRequest fwd =
      base_request(OperatorKind::BackTranslation, "translate_forward", ctx);
  fwd.user_prompt = render_template(
      ctx.templates->get("translate_forward"),
      {{"text", parent.text}, {"pivot", ctx.pivot_language}});
  fwd.source_texts = {parent.text};

  GeneratorRequest back =
      base_request(OperatorKind::BackTranslation, "translate_back", ctx);
  // caller substitutes stage one's output for {text} and source_texts
  back.user_prompt = ctx.templates->get("translate_back");
  return {fwd, back};
}

std::pair<const TaxonomyCategory*, std::vector<std::string>> select_concept(
    const Taxonomy& taxonomy, std::mt19937_64& rng) {
  if (taxonomy.empty()) throw std::invalid_argument("select_concept: empty taxonomy");
  const auto& cat = taxonomy[uniform_index(rng, taxonomy.size())];
  return {&cat, cat.items};
}

std::pair<std::string, std::string> select_style(const Taxonomy& taxonomy,
                                                 std::mt19937_64& rng) {
  if (taxonomy.empty()) throw std::invalid_argument("select_style: empty taxonomy");
  const auto& attr = taxonomy[uniform_index(rng, taxonomy.size())];
  return {attr.name, attr.items[uniform_index(rng, attr.items.size())]};
}

GeneratorRequest build_concept_request(const PromptGenome& parent,
                                       const OperatorContext& ctx,
                                       std::mt19937_64& rng) {
  auto [cat, subtypes] = select_concept(*ctx.concepts, rng);
  std::string joined;
  for (size_t i = 0; i < subtypes.size(); ++i) {
    if (i) joined += ", ";
    joined += subtypes[i];
  }
  GeneratorRequest req = base_request(OperatorKind::ConceptAddition, "mutate", ctx);
  req.user_prompt = render_template(
      ctx.templates->get("concept_addition"),
      {{"category", cat->name}, {"subtypes", joined}, {"parent", parent.text}});
  req.source_texts = {parent.text};
  return req;
}

GeneratorRequest build_stylistic_request(const PromptGenome& parent,
                                         const OperatorContext& ctx,
                                         std::mt19937_64& rng) {
  auto [attribute, variant] = select_style(*ctx.styles, rng);
  GeneratorRequest req = base_request(OperatorKind::StylisticTransfer, "mutate", ctx);
  req.user_prompt = render_template(
      ctx.templates->get("stylistic"),
      {{"attribute", attribute}, {"variant", variant}, {"parent", parent.text}});
  req.source_texts = {parent.text};
  return req;
}

GeneratorRequest inject_typos(const PromptGenome& parent,
                              const OperatorContext& ctx, std::mt19937_64& rng) {
  if (trim(parent.text).empty())
    throw std::invalid_argument("inject_typos: empty text");
  const auto& cat = (*ctx.typos)[uniform_index(rng, ctx.typos->size())];
  const auto& subtype = cat.items[uniform_index(rng, cat.items.size())];
  GeneratorRequest req =
      base_request(OperatorKind::TypographicalErrors, "mutate", ctx);
  req.user_prompt = render_template(
      ctx.templates->get("typos"),
      {{"error_category", cat.name}, {"error_subtype", subtype}, {"parent", parent.text}});
  req.source_texts = {parent.text};
  return req;
}

GeneratorRequest build_paraphrase_request(const PromptGenome& parent,
                                          const OperatorContext& ctx) {
  GeneratorRequest req = base_request(OperatorKind::Paraphrasing, "mutate", ctx);
  req.user_prompt =
      render_template(ctx.templates->get("paraphrase"), {{"parent", parent.text}});
  req.source_texts = {parent.text};
  return req;
}

std::optional<GeneratorRequest> build_informed_request(
    const std::vector<PromptGenome>& elite_top, const OperatorContext& ctx) {
  if (elite_top.empty()) return std::nullopt;
  std::ostringstream exemplars;
  for (size_t i = 0; i < elite_top.size(); ++i) {
    exemplars << (i + 1) << ". (score " << elite_top[i].toxicity << ") "
              << elite_top[i].text << "\n";
  }
  GeneratorRequest req =
      base_request(OperatorKind::InformedEvolution, "informed", ctx);
  req.user_prompt = render_template(ctx.templates->get("informed"),
                                    {{"exemplars", exemplars.str()}});
  for (const auto& g : elite_top) req.source_texts.push_back(g.text);
  return req;
}

GeneratorRequest build_fusion_request(const PromptGenome& p1,
                                      const PromptGenome& p2,
                                      const OperatorContext& ctx) {
  GeneratorRequest req =
      base_request(OperatorKind::SemanticFusionCrossover, "fuse", ctx);
  req.user_prompt = render_template(ctx.templates->get("fusion"),
                                    {{"parent1", p1.text}, {"parent2", p2.text}});
  req.source_texts = {p1.text, p2.text};
  return req;
}

namespace {

// Scores a child prompt once: responder then moderation oracle.
struct ScoreResult {
  bool ok = false;
  double toxicity = 0.0;
  std::string cause;
};

ScoreResult score_child(const std::string& text, const BackendSuite& backends) {
  std::string response;
  try {
    response = backends.responder->respond(text);
  } catch (const BackendError& e) {
    return {false, 0.0, std::string("responder unavailable: ") + e.what()};
  }
  try {
    return {true, backends.moderation->moderate(response).toxicity(), ""};
  } catch (const BackendError& e) {
    return {false, 0.0, std::string("oracle unavailable: ") + e.what()};
  }
}

std::vector<std::string> split_fills(const std::string& payload) {
  std::vector<std::string> fills;
  size_t pos = 0;
  while (pos <= payload.size()) {
    auto bar = payload.find('|', pos);
    std::string part = trim(payload.substr(
        pos, bar == std::string::npos ? std::string::npos : bar - pos));
    fills.push_back(part);
    if (bar == std::string::npos) break;
    pos = bar + 1;
  }
  return fills;
}

}  // namespace

SpawnOutcome spawn_children(const std::vector<PromptGenome>& parents,
                            const std::vector<PromptGenome>& elites_by_score,
                            const BackendSuite& backends,
                            const OperatorContext& ctx,
                            std::span<const std::string> refusal_patterns,
                            std::unordered_set<std::string>& existing_normalized,
                            std::uint64_t& next_id, const SpawnConfig& config) {
  SpawnOutcome out;
  std::uint64_t attempt_index = 0;

  auto enabled = [&](OperatorKind k) {
    return std::find(config.enabled.begin(), config.enabled.end(), k) !=
           config.enabled.end();
  };

  auto finish_attempt = [&](ChildRecord rec, std::optional<std::string> child_text) {
    if (child_text) {
      ValidityVerdict v = classify_child_text(*child_text, existing_normalized);
      rec.text = *child_text;
      rec.status = std::string(status_name(v.status));
      if (!v.cause.empty()) rec.cause = v.cause;  // keep e.g. "degenerate pair"
      if (v.status == ValidityStatus::Valid) {
        ScoreResult score = score_child(*child_text, backends);
        if (!score.ok) {
          rec.status = std::string(status_name(ValidityStatus::MalformedOutput));
          rec.cause = score.cause;
        } else {
          rec.id = next_id++;
          rec.toxicity = score.toxicity;
          existing_normalized.insert(normalize_text(*child_text));
          PromptGenome g;
          g.id = rec.id;
          g.text = *child_text;
          g.toxicity = score.toxicity;
          g.generation_born = config.generation;
          g.op = rec.op;
          g.parent_ids = rec.parent_ids;
          g.parent_baseline = rec.parent_baseline;
          out.children.push_back(std::move(g));
        }
      }
    }
    ++out.attempted;
    out.records.push_back(std::move(rec));
  };

  auto record_skip = [&](ChildRecord rec, const std::string& why) {
    rec.status = "skipped";
    rec.cause = why;
    ++out.skipped;
    out.records.push_back(std::move(rec));
  };

  auto record_invalid = [&](ChildRecord rec, ValidityStatus status,
                            const std::string& cause, const std::string& text = "") {
    rec.status = std::string(status_name(status));
    rec.cause = cause;
    rec.text = text;
    ++out.attempted;
    out.records.push_back(std::move(rec));
  };

  auto generate = [&](GeneratorRequest req, std::uint64_t draw,
                      std::string* raw_out) -> bool {
    req.rng_draw = draw;
    try {
      *raw_out = backends.prompt_generator->generate(req);
      return true;
    } catch (const BackendError&) {
      return false;
    }
  };

  // --- mutations: every enabled kind per parent ---
  for (const auto& parent : parents) {
    for (OperatorKind kind : all_operators()) {
      if (is_crossover(kind) || !enabled(kind)) continue;
      std::uint64_t draw =
          derive_seed(config.master_seed, static_cast<std::uint64_t>(config.generation),
                      attempt_index++);
      std::mt19937_64 rng = substream(draw, 1);

      ChildRecord rec;
      rec.generation = config.generation;
      rec.op = std::string(operator_name(kind));
      rec.mode = config.mode;
      rec.fallback_sampling = config.fallback_sampling;
      rec.parent_ids = {parent.id};
      rec.parent_baseline = parent.toxicity;

      std::optional<GeneratorRequest> req;
      MaskedPrompt masked;
      bool is_mlm = false, is_backtranslation = false;

      switch (kind) {
        case OperatorKind::SynonymReplacement:
        case OperatorKind::AntonymReplacement:
          req = build_lexical_request(kind, parent, ctx, rng);
          if (!req) {
            record_skip(std::move(rec), "no open-class words");
            continue;
          }
          break;
        case OperatorKind::MlmSubstitution: {
          auto words = split_words(parent.text);
          if (words.size() < static_cast<size_t>(ctx.mask_count)) {
            record_skip(std::move(rec), "fewer words than masks");
            continue;
          }
          masked = mask_words(parent.text, ctx.mask_count, rng);
          req = build_mlm_request(masked, ctx);
          is_mlm = true;
          break;
        }
        case OperatorKind::Negation:
          req = build_negation_request(parent, ctx);
          break;
        case OperatorKind::BackTranslation:
          is_backtranslation = true;
          break;
        case OperatorKind::ConceptAddition:
          req = build_concept_request(parent, ctx, rng);
          break;
        case OperatorKind::StylisticTransfer:
          req = build_stylistic_request(parent, ctx, rng);
          break;
        case OperatorKind::TypographicalErrors:
          req = inject_typos(parent, ctx, rng);
          break;
        case OperatorKind::Paraphrasing:
          req = build_paraphrase_request(parent, ctx);
          break;
        case OperatorKind::InformedEvolution: {
          std::vector<PromptGenome> top(
              elites_by_score.begin(),
              elites_by_score.begin() +
                  std::min<size_t>(elites_by_score.size(), ctx.informed_exemplars));
          req = build_informed_request(top, ctx);
          if (!req) {
            record_skip(std::move(rec), "no exemplars");
            continue;
          }
          rec.parent_ids = {top.front().id};
          rec.parent_baseline = top.front().toxicity;
          break;
        }
        default:
          continue;
      }

      if (is_backtranslation) {
        auto [fwd, back] = build_backtranslation_requests(parent, ctx);
        std::string stage1;
        if (!generate(fwd, derive_seed(config.master_seed, config.generation,
                                       attempt_index, 1),
                      &stage1)) {
          record_invalid(std::move(rec), ValidityStatus::MalformedOutput,
                         "backend unavailable (stage 1)");
          continue;
        }
        if (is_refusal(stage1, refusal_patterns)) {
          record_invalid(std::move(rec), ValidityStatus::Refusal,
                         "stage 1 refusal or empty");
          continue;
        }
        auto pivot_text = parse_sentinel(stage1);
        if (!pivot_text) {
          record_invalid(std::move(rec), ValidityStatus::MalformedOutput,
                         "stage 1 missing sentinel");
          continue;
        }
        back.user_prompt = render_template(
            back.user_prompt, {{"text", *pivot_text}, {"pivot", ctx.pivot_language}});
        back.source_texts = {*pivot_text};
        std::string stage2;
        if (!generate(back, derive_seed(config.master_seed, config.generation,
                                        attempt_index, 2),
                      &stage2)) {
          record_invalid(std::move(rec), ValidityStatus::MalformedOutput,
                         "backend unavailable (stage 2)");
          continue;
        }
        if (is_refusal(stage2, refusal_patterns)) {
          record_invalid(std::move(rec), ValidityStatus::Refusal, "stage 2 refusal");
          continue;
        }
        auto payload = parse_sentinel(stage2);
        if (!payload) {
          record_invalid(std::move(rec), ValidityStatus::MalformedOutput,
                         "stage 2 missing sentinel");
          continue;
        }
        finish_attempt(std::move(rec), payload);
        continue;
      }

      std::string raw;
      if (!generate(*req, derive_seed(config.master_seed, config.generation,
                                      attempt_index, 0),
                    &raw)) {
        record_invalid(std::move(rec), ValidityStatus::MalformedOutput,
                       "backend unavailable");
        continue;
      }
      if (is_refusal(raw, refusal_patterns)) {
        record_invalid(std::move(rec), ValidityStatus::Refusal,
                       "generator refusal or empty");
        continue;
      }
      auto payload = parse_sentinel(raw);
      if (!payload) {
        record_invalid(std::move(rec), ValidityStatus::MalformedOutput,
                       "missing result sentinel");
        continue;
      }

      if (is_mlm) {
        auto fills = split_fills(*payload);
        bool bad = fills.size() != masked.originals.size();
        for (const auto& f : fills) {
          if (f.empty() || f.find("[MASK_") != std::string::npos) bad = true;
        }
        if (bad) {
          record_invalid(std::move(rec), ValidityStatus::MalformedOutput,
                         "bad mask fills", *payload);
          continue;
        }
        finish_attempt(std::move(rec), apply_fills(masked, fills));
      } else {
        finish_attempt(std::move(rec), payload);
      }
    }
  }

  // --- crossovers: every enabled kind per unique parent pair ---
  for (size_t i = 0; i < parents.size(); ++i) {
    for (size_t j = i + 1; j < parents.size(); ++j) {
      const PromptGenome& p1 = parents[i];
      const PromptGenome& p2 = parents[j];
      for (OperatorKind kind : {OperatorKind::SemanticSimilarityCrossover,
                                OperatorKind::SemanticFusionCrossover}) {
        if (!enabled(kind)) continue;
        std::uint64_t draw =
            derive_seed(config.master_seed,
                        static_cast<std::uint64_t>(config.generation), attempt_index++);

        ChildRecord rec;
        rec.generation = config.generation;
        rec.op = std::string(operator_name(kind));
        rec.mode = config.mode;
        rec.fallback_sampling = config.fallback_sampling;
        rec.parent_ids = {p1.id, p2.id};
        rec.parent_baseline = (p1.toxicity + p2.toxicity) / 2.0;
        if (p1.id == p2.id) rec.cause = "degenerate pair";

        if (kind == OperatorKind::SemanticSimilarityCrossover) {
          std::optional<std::string> child;
          try {
            child = semantic_similarity_crossover(p1.text, p2.text,
                                                  *backends.embedder,
                                                  ctx.similarity_threshold);
          } catch (const BackendError& e) {
            record_invalid(std::move(rec), ValidityStatus::MalformedOutput,
                           std::string("embedder failure: ") + e.what());
            continue;
          }
          if (!child) {
            record_skip(std::move(rec), "no sentence pair above threshold");
            continue;
          }
          finish_attempt(std::move(rec), child);
        } else {
          GeneratorRequest req = build_fusion_request(p1, p2, ctx);
          std::string raw;
          if (!generate(req, derive_seed(config.master_seed, config.generation,
                                         attempt_index, 0),
                        &raw)) {
            record_invalid(std::move(rec), ValidityStatus::MalformedOutput,
                           "backend unavailable");
            continue;
          }
          if (is_refusal(raw, refusal_patterns)) {
            record_invalid(std::move(rec), ValidityStatus::Refusal,
                           "generator refusal or empty");
            continue;
          }
          auto payload = parse_sentinel(raw);
          if (!payload) {
            record_invalid(std::move(rec), ValidityStatus::MalformedOutput,
                           "missing result sentinel");
            continue;
          }
          finish_attempt(std::move(rec), payload);
        }
      }
    }
  }

  return out;
}

}  // namespace toxsearch
