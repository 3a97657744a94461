// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Everything runs against the in-process simulators.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "toxsearch/analytics.hpp"
#include "toxsearch/controller.hpp"
#include "toxsearch/http_backends.hpp"
#include "toxsearch/operators.hpp"
#include "toxsearch/population.hpp"
#include "toxsearch/rng.hpp"
#include "toxsearch/run.hpp"
#include "toxsearch/simulators.hpp"
#include "toxsearch/stats.hpp"
#include "toxsearch/taxonomy.hpp"
#include "toxsearch/text.hpp"
#include "toxsearch/transfer.hpp"
#include "toxsearch/validity.hpp"

using namespace toxsearch;
using nlohmann::json;

namespace {

int failures = 0;

void report(int criterion, const char* what, bool ok) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what);
  if (!ok) ++failures;
}

#define EXPECT(cond)            \
  do {                          \
    if (!(cond)) return false;  \
  } while (0)

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("acceptance_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

RunConfig simulator_config(const std::filesystem::path& out_dir,
                           int generations, std::uint64_t seed) {
  RunConfig c;
  c.generations = generations;
  c.rng_seed = seed;
  c.output_dir = out_dir;
  c.similarity_threshold = -2.0;
  c.backends["prompt_generator"] = {
      "perturbing",
      json{{"seed", seed ^ 0x9e37ULL},
           {"vocabulary", {"distrust", "blame", "resent", "mock", "shun"}}}};
  c.backends["responder"] = {"echo", json::object()};
  c.backends["moderation"] = {
      "lexicon",
      json{{"terms", {{"distrust", 1.0}, {"blame", 2.0}, {"resent", 3.0}}}}};
  c.backends["embedder"] = {"hash", json{{"dim", 64}}};
  return c;
}

std::vector<std::string> question_seeds(int n, std::uint64_t salt) {
  const char* subjects[] = {"money", "power",  "fame",    "status",  "land",
                            "food",  "work",   "family",  "history", "science",
                            "music", "sports", "weather", "travel",  "art",
                            "trade", "school", "health",  "trust",   "luck"};
  std::vector<std::string> seeds;
  for (int i = 0; i < n; ++i) {
    seeds.push_back("Why do people argue about " +
                    std::string(subjects[(i + salt) % 20]) + " case " +
                    std::to_string(i) + "?");
  }
  return seeds;
}

// ---- criterion 1 ----
bool threshold_math() {
  auto th = compute_thresholds(0.8, 30, 3);
  EXPECT(th.tau_e == (1.0 - 30.0 / 100.0) * 0.8);
  EXPECT(th.tau_r == (3.0 / 100.0) * 0.8);
  EXPECT(std::abs(th.tau_e - 0.56) < 1e-15);
  EXPECT(std::abs(th.tau_r - 0.024) < 1e-15);
  std::mt19937_64 rng(101);
  for (int i = 0; i < 1000; ++i) {
    double s_max = uniform_real(rng);
    double alpha = 1.0 + 98.0 * uniform_real(rng);
    double beta = alpha * 0.99 * uniform_real(rng);
    auto t = compute_thresholds(s_max, alpha, beta);
    EXPECT(t.tau_e == (1.0 - alpha / 100.0) * s_max);  // tolerance zero
    EXPECT(t.tau_r == (beta / 100.0) * s_max);
  }
  return true;
}

// ---- criterion 2 ----
bool best_score_monotonicity() {
  auto dir = scratch("monotone");
  for (int run = 0; run < 100; ++run) {
    RunConfig c = simulator_config(dir / ("r" + std::to_string(run)), 20,
                                   1000 + run);
    BackendSuite suite = build_backend_suite(c);
    run_evolution(c, suite, question_seeds(20, run), false);
    RunLog log = read_run_log(c.output_dir / "run_log.jsonl");
    EXPECT(log.generations.size() == 21);
    for (size_t i = 1; i < log.generations.size(); ++i)
      EXPECT(log.generations[i].best_score >= log.generations[i - 1].best_score);
  }
  std::filesystem::remove_all(dir);
  return true;
}

// ---- criterion 3 ----
bool controller_oracle() {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 10000; ++i) {
    size_t n = 2 + uniform_index(rng, 9);
    std::vector<double> y;
    for (size_t k = 0; k < n; ++k) y.push_back(uniform_real(rng));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < n; ++k) {
      sx += k;
      sy += y[k];
      sxx += double(k) * k;
      sxy += k * y[k];
    }
    double brute = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    EXPECT(std::abs(ols_slope(y) - brute) < 1e-12);
  }
  for (double slope : {-0.01, -0.0011, -0.001, 0.0, 0.01}) {
    for (bool stagnant : {true, false}) {
      Mode m = decide_mode(slope, stagnant, 1e-3);
      Mode expected = slope < -1e-3 ? Mode::Exploit
                      : stagnant    ? Mode::Explore
                                    : Mode::Default;
      EXPECT(m == expected);
    }
  }
  return true;
}

// ---- criterion 4 ----
bool children_count_identity() {
  TemplateSet templates;
  Taxonomy concepts = builtin_concept_taxonomy();
  Taxonomy styles = builtin_style_taxonomy();
  Taxonomy typos = builtin_typo_taxonomy();
  RuleBasedTagger tagger;
  OperatorContext ctx;
  ctx.templates = &templates;
  ctx.concepts = &concepts;
  ctx.styles = &styles;
  ctx.typos = &typos;
  ctx.tagger = &tagger;
  ctx.similarity_threshold = -2.0;  // the similarity crossover cannot skip

  BackendSuite suite;
  suite.prompt_generator = std::make_shared<PerturbingGenerator>(
      5, std::vector<std::string>{"distrust", "blame"});
  suite.responder = std::make_shared<EchoResponder>();
  suite.moderation = std::make_shared<LexiconModeration>(
      std::map<std::string, double>{{"distrust", 1.0}});
  suite.embedder = std::make_shared<HashEmbedder>(64);

  auto parent = [](std::uint64_t id, const std::string& text) {
    PromptGenome g;
    g.id = id;
    g.text = text;
    g.toxicity = 0.1 * id;
    return g;
  };

  for (size_t n_parents : {size_t{2}, size_t{3}}) {
    std::vector<PromptGenome> parents;
    for (size_t i = 0; i < n_parents; ++i)
      parents.push_back(parent(i + 1, question_seeds(3, i)[i]));
    std::unordered_set<std::string> existing;
    std::uint64_t next_id = 100;
    SpawnConfig cfg;
    cfg.generation = 1;
    cfg.master_seed = 42;
    auto out = spawn_children(parents, parents, suite, ctx,
                              default_refusal_patterns(), existing, next_id, cfg);
    const int expected =
        static_cast<int>(n_parents) * 10 +
        static_cast<int>(n_parents * (n_parents - 1) / 2) * 2;
    EXPECT(out.skipped == 0);
    EXPECT(out.attempted == expected);  // 22 and 36
  }
  return true;
}

// ---- criterion 5 ----
bool taxonomy_integrity() {
  const std::filesystem::path assets(TOXSEARCH_ASSET_DIR);
  auto concepts = load_concept_taxonomy(assets);
  EXPECT(concepts.size() == 8);
  EXPECT(total_items(concepts) == 29);
  EXPECT(concepts == builtin_concept_taxonomy());
  auto styles = load_style_taxonomy(assets);
  EXPECT(styles.size() == 12);
  EXPECT(styles == builtin_style_taxonomy());
  auto typos = load_typo_taxonomy(assets);
  EXPECT(typos.size() == 8);
  for (const auto& cat : typos) EXPECT(cat.items.size() == 4);
  EXPECT(typos == builtin_typo_taxonomy());
  return true;
}

// ---- criterion 6 ----
bool statistics_oracles() {
  auto kw = kruskal_wallis({{1, 2, 3}, {4, 5, 6}});
  EXPECT(std::abs(kw.statistic - 3.857) < 1e-3);

  auto mw = mann_whitney_u(std::vector<double>{1, 2, 3},
                           std::vector<double>{4, 5, 6});
  EXPECT(mw.statistic == 0.0);

  std::mt19937_64 rng(66);
  for (int trial = 0; trial < 500; ++trial) {
    size_t na = 2 + uniform_index(rng, 5), nb = 2 + uniform_index(rng, 5);
    std::vector<double> pool;
    for (size_t i = 0; i < na + nb; ++i)
      pool.push_back(i + 0.4 * uniform_real(rng));
    for (size_t k = 0; k < pool.size(); ++k) {
      size_t j = k + uniform_index(rng, pool.size() - k);
      std::swap(pool[k], pool[j]);
    }
    std::vector<double> a(pool.begin(), pool.begin() + na);
    std::vector<double> b(pool.begin() + na, pool.end());
    EXPECT(std::abs(mann_whitney_exact_p(a, b) - mann_whitney_approx_p(a, b)) <
           0.02);
  }

  EXPECT(std::abs(bonferroni_alpha(0.05, 66) - 0.000758) < 5e-7 + 2.5e-7);
  EXPECT(std::abs(bonferroni_alpha(0.05, 66) - 0.05 / 66.0) == 0.0);
  return true;
}

// ---- criterion 7 ----
bool metric_identities() {
  std::mt19937_64 rng(77);
  const char* statuses[] = {"valid", "refusal", "malformed", "non_question",
                            "duplicate"};
  const char* tiers[] = {"elite", "non_elite", "underperforming"};
  for (int log_i = 0; log_i < 1000; ++log_i) {
    std::vector<ChildRecord> records;
    size_t n = 1 + uniform_index(rng, 50);
    for (size_t i = 0; i < n; ++i) {
      ChildRecord r;
      r.op = "negation";
      r.status = statuses[uniform_index(rng, 5)];
      if (r.status == "valid") {
        r.tier = tiers[uniform_index(rng, 3)];
        r.toxicity = uniform_real(rng);
      }
      records.push_back(std::move(r));
    }
    auto m = compute_operator_metrics(records, "negation");
    EXPECT(m.elite_hits + m.non_elite_insertions + m.underperforming +
               m.invalid + m.duplicate ==
           m.attempted);
  }

  // worked example: 10 attempts -> IR 10, EHR 10, NE 50, cEHR 12.5
  std::vector<ChildRecord> records;
  auto push = [&](const char* status, const char* tier, int count) {
    for (int i = 0; i < count; ++i) {
      ChildRecord r;
      r.op = "negation";
      r.status = status;
      if (std::string(status) == "valid") {
        r.tier = tier;
        r.toxicity = 0.5;
      }
      records.push_back(std::move(r));
    }
  };
  push("refusal", "", 1);
  push("duplicate", "", 1);
  push("valid", "elite", 1);
  push("valid", "non_elite", 5);
  push("valid", "underperforming", 2);
  auto m = compute_operator_metrics(records, "negation");
  EXPECT(m.attempted == 10);
  EXPECT(std::abs(*m.ir - 10.0) < 1e-12);
  EXPECT(std::abs(*m.ehr - 10.0) < 1e-12);
  EXPECT(std::abs(*m.ne - 50.0) < 1e-12);
  EXPECT(std::abs(*m.cehr - 12.5) < 1e-12);
  return true;
}

// ---- criterion 8 ----
bool transfer_set_construction() {
  std::vector<TransferEntry> entries;
  for (int i = 0; i < 696; ++i)
    entries.push_back({"why does item " + std::to_string(i) + " matter?",
                       0.36 + 0.5 * i / 695.0});
  auto set = build_transfer_set(entries, 0.25);
  EXPECT(set.entries.size() == 174);

  std::vector<TransferEntry> dup{{"why does this matter?", 0.4},
                                 {"WHY DOES THIS MATTER", 0.7}};
  auto kept = build_transfer_set(dup, 1.0);
  EXPECT(kept.entries.size() == 1);
  EXPECT(kept.entries[0].source_toxicity == 0.7);

  auto again = build_transfer_set(set.entries, 1.0);
  EXPECT(again.entries.size() == set.entries.size());
  for (size_t i = 0; i < set.entries.size(); ++i)
    EXPECT(again.entries[i].text == set.entries[i].text);
  return true;
}

// ---- criterion 9 ----
bool run_determinism() {
  auto dir = scratch("determinism");
  RunConfig a = simulator_config(dir / "a", 5, 42);
  RunConfig b = simulator_config(dir / "b", 5, 42);
  auto seeds = question_seeds(12, 0);
  run_evolution(a, build_backend_suite(a), seeds, false);
  run_evolution(b, build_backend_suite(b), seeds, false);
  EXPECT(slurp(a.output_dir / "run_log.jsonl") ==
         slurp(b.output_dir / "run_log.jsonl"));
  std::filesystem::remove_all(dir);
  return true;
}

// ---- criterion 10 ----
bool wire_format_goldens() {
  json analyze = build_analyze_request("pinned text");
  json analyze_pinned = json::parse(R"({
    "comment": {"text": "pinned text"},
    "requestedAttributes": {
      "TOXICITY": {}, "SEVERE_TOXICITY": {}, "INSULT": {},
      "IDENTITY_ATTACK": {}, "THREAT": {}, "PROFANITY": {}
    },
    "doNotStore": true
  })");
  EXPECT(analyze == analyze_pinned);

  json analyze_response = json::parse(R"({
    "attributeScores": {
      "TOXICITY": {"summaryScore": {"value": 0.91, "type": "PROBABILITY"}}
    }
  })");
  EXPECT(parse_analyze_response(analyze_response).toxicity() == 0.91);

  GeneratorConfig config;
  config.model = "pinned-model";
  config.temperature = 0.9;
  config.max_tokens = 256;
  json chat = build_chat_request(config, {{"system", "s"}, {"user", "u"}});
  json chat_pinned = json::parse(R"({
    "model": "pinned-model",
    "messages": [{"role": "system", "content": "s"},
                 {"role": "user", "content": "u"}],
    "temperature": 0.9,
    "max_tokens": 256
  })");
  EXPECT(chat == chat_pinned);

  json chat_response = json::parse(R"({
    "choices": [{"message": {"role": "assistant", "content": "round trip"}}]
  })");
  EXPECT(parse_chat_response(chat_response) == "round trip");
  return true;
}

// ---- criterion 11 ----

// Injects the lowest-index absent lexicon term into the source prompt, so
// each successful child strictly raises the matched weight.
class ClimbingGenerator : public PromptGeneratorBackend {
 public:
  explicit ClimbingGenerator(std::vector<std::string> terms)
      : terms_(std::move(terms)) {}

  std::string generate(const GeneratorRequest& request) override {
    std::string source =
        request.source_texts.empty() ? "why?" : request.source_texts[0];
    if (request.purpose == "mlm") {
      // fill every mask with the next absent term
      size_t masks = 0, pos = 0;
      while ((pos = source.find("[MASK_", pos)) != std::string::npos) {
        ++masks;
        pos += 6;
      }
      std::string term = next_term(source);
      std::string fills;
      for (size_t i = 0; i < masks; ++i) {
        if (i) fills += " | ";
        fills += term;
      }
      return "RESULT: " + fills;
    }
    std::string base = trim(source);
    while (!base.empty() && (base.back() == '?' || base.back() == '.'))
      base.pop_back();
    return "RESULT: " + base + " " + next_term(source) + "?";
  }
  std::string name() const override { return "climbing-generator"; }

 private:
  std::string next_term(const std::string& text) const {
    std::string lowered = to_lower(text);
    for (const auto& t : terms_) {
      if (lowered.find(t) == std::string::npos) return t;
    }
    return terms_.back();
  }
  std::vector<std::string> terms_;
};

bool end_to_end_climb() {
  auto dir = scratch("climb");
  std::vector<std::string> terms;
  std::map<std::string, double> weights;
  for (int i = 0; i < 40; ++i) {
    std::string t = "term" + std::string(1, char('a' + i / 10)) +
                    std::string(1, char('a' + i % 10));
    terms.push_back(t);
    weights[t] = 1.0 + i;
  }

  RunConfig c;
  c.generations = 30;
  c.rng_seed = 42;
  c.output_dir = dir / "out";
  c.similarity_threshold = -2.0;

  BackendSuite suite;
  suite.prompt_generator = std::make_shared<ClimbingGenerator>(terms);
  suite.responder = std::make_shared<EchoResponder>();
  suite.moderation = std::make_shared<LexiconModeration>(weights);
  suite.embedder = std::make_shared<HashEmbedder>(64);

  auto result = run_evolution(c, suite, question_seeds(10, 3), false);
  EXPECT(!result.elites.empty());

  RunLog log = read_run_log(c.output_dir / "run_log.jsonl");
  bool improved = false;
  for (size_t i = 1; i < log.generations.size(); ++i) {
    EXPECT(log.generations[i].best_score >= log.generations[i - 1].best_score);
    if (log.generations[i].best_score > log.generations[i - 1].best_score)
      improved = true;
  }
  EXPECT(improved);
  std::filesystem::remove_all(dir);
  return true;
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  auto timed = [](const std::function<bool()>& f, double budget_s, double* out) {
    auto t0 = clock::now();
    bool ok = false;
    try {
      ok = f();
    } catch (const std::exception& e) {
      std::fprintf(stderr, "  exception: %s\n", e.what());
      ok = false;
    }
    double s = std::chrono::duration<double>(clock::now() - t0).count();
    if (out) *out = s;
    return ok && (budget_s <= 0 || s < budget_s);
  };

  report(1, "ratio thresholds exact on 1000 random triples", timed(threshold_math, 1.0, nullptr));
  report(2, "best-so-far monotone over 100 simulated runs", timed(best_score_monotonicity, 30.0, nullptr));
  report(3, "slope oracle and mode decision table", timed(controller_oracle, 0, nullptr));
  report(4, "attempted children 22 (two parents) / 36 (three parents)", timed(children_count_identity, 0, nullptr));
  report(5, "taxonomies match goldens (8/29, 12, 8x4)", timed(taxonomy_integrity, 0, nullptr));
  report(6, "rank-test and correction oracles", timed(statistics_oracles, 0, nullptr));
  report(7, "operator metric identities and worked example", timed(metric_identities, 0, nullptr));
  report(8, "transfer selection 696 -> 174, max-keep dedupe, idempotent", timed(transfer_set_construction, 0, nullptr));
  report(9, "byte-identical run logs from identical config and seed", timed(run_determinism, 10.0, nullptr));
  report(10, "chat and moderation wire-format goldens", timed(wire_format_goldens, 0, nullptr));
  report(11, "simulated end-to-end fitness climb over 30 generations", timed(end_to_end_climb, 0, nullptr));

  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all 11 criteria passed\n");
  return 0;
}
