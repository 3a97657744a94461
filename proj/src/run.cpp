#include "toxsearch/run.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_set>

#include "toxsearch/controller.hpp"
#include "toxsearch/http_backends.hpp"
#include "toxsearch/pos_tagger.hpp"
#include "toxsearch/rng.hpp"
#include "toxsearch/simulators.hpp"
#include "toxsearch/taxonomy.hpp"
#include "toxsearch/templates.hpp"
#include "toxsearch/text.hpp"
#include "toxsearch/validity.hpp"

namespace toxsearch {

using nlohmann::json;

namespace {

BackendSpec parse_backend_spec(const json& j) {
  BackendSpec spec;
  spec.type = j.at("type").get<std::string>();
  spec.options = j.value("options", json::object());
  return spec;
}

json backend_spec_to_json(const BackendSpec& spec) {
  return {{"type", spec.type}, {"options", spec.options}};
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  RunConfig c;
  try {
    c.generations = j.value("generations", c.generations);
    c.alpha = j.value("alpha", c.alpha);
    c.beta = j.value("beta", c.beta);
    c.window = j.value("window", c.window);
    c.tau_slope = j.value("tau_slope", c.tau_slope);
    c.seed_count = j.value("seed_count", c.seed_count);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    for (const auto& f : j.value("seed_files", std::vector<std::string>{}))
      c.seed_files.emplace_back(f);
    if (j.contains("operators")) {
      c.operators.clear();
      for (const auto& name : j.at("operators")) {
        auto kind = operator_from_name(name.get<std::string>());
        if (!kind) throw ConfigError("unknown operator: " + name.get<std::string>());
        c.operators.push_back(*kind);
      }
    }
    c.pivot_language = j.value("pivot_language", c.pivot_language);
    c.mask_count = j.value("mask_count", c.mask_count);
    c.similarity_threshold = j.value("similarity_threshold", c.similarity_threshold);
    c.output_dir = j.value("output_dir", c.output_dir.string());
    c.assets_dir = j.value("assets_dir", std::string{});
    if (j.contains("refusal_patterns_file"))
      c.refusal_patterns_file = j.at("refusal_patterns_file").get<std::string>();
    c.requests_per_second = j.value("requests_per_second", c.requests_per_second);
    if (j.contains("backends")) {
      for (const auto& [role, spec] : j.at("backends").items())
        c.backends[role] = parse_backend_spec(spec);
    }
    for (const auto& t : j.value("transfer_targets", json::array())) {
      TransferTargetSpec spec;
      spec.name = t.at("name").get<std::string>();
      spec.responder = parse_backend_spec(t.at("responder"));
      spec.moderation = parse_backend_spec(t.at("moderation"));
      c.transfer_targets.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (c.generations < 0) throw ConfigError("generations must be >= 0");
  if (!(c.alpha > 0.0 && c.alpha < 100.0)) throw ConfigError("alpha outside (0,100)");
  if (!(c.beta >= 0.0 && c.beta < c.alpha)) throw ConfigError("requires 0 <= beta < alpha");
  if (c.window < 2) throw ConfigError("window must be >= 2");
  if (c.seed_count < 1) throw ConfigError("seed_count must be >= 1");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file: " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_run_config(j);
}

json run_config_to_json(const RunConfig& c) {
  json ops = json::array();
  for (auto k : c.operators) ops.push_back(std::string(operator_name(k)));
  json files = json::array();
  for (const auto& f : c.seed_files) files.push_back(f.string());
  json backends = json::object();
  for (const auto& [role, spec] : c.backends) backends[role] = backend_spec_to_json(spec);
  json targets = json::array();
  for (const auto& t : c.transfer_targets) {
    targets.push_back({{"name", t.name},
                       {"responder", backend_spec_to_json(t.responder)},
                       {"moderation", backend_spec_to_json(t.moderation)}});
  }
  return {{"generations", c.generations},
          {"alpha", c.alpha},
          {"beta", c.beta},
          {"window", c.window},
          {"tau_slope", c.tau_slope},
          {"seed_count", c.seed_count},
          {"rng_seed", c.rng_seed},
          {"seed_files", files},
          {"operators", ops},
          {"pivot_language", c.pivot_language},
          {"mask_count", c.mask_count},
          {"similarity_threshold", c.similarity_threshold},
          {"output_dir", c.output_dir.string()},
          {"assets_dir", c.assets_dir.string()},
          {"requests_per_second", c.requests_per_second},
          {"backends", backends},
          {"transfer_targets", targets}};
}

namespace {

GeneratorConfig parse_generator_config(const json& options, double default_temp) {
  GeneratorConfig g;
  g.endpoint = options.value("endpoint", "");
  g.model = options.value("model", "");
  g.temperature = options.value("temperature", default_temp);
  g.max_context = options.value("max_context", 2048);
  g.max_tokens = options.value("max_tokens", 256);
  g.system_prompt = options.value("system_prompt", "");
  g.retry.max_attempts = options.value("retry_max_attempts", 3);
  g.retry.backoff_ms = options.value("retry_backoff_ms", 250);
  return g;
}

std::shared_ptr<PromptGeneratorBackend> build_prompt_generator(
    const BackendSpec& spec, std::uint64_t rng_seed, double rps) {
  if (spec.type == "http") {
    return std::make_shared<HttpPromptGenerator>(
        parse_generator_config(spec.options, 0.9), rps);
  }
  if (spec.type == "perturbing") {
    auto vocab = spec.options.value("vocabulary", std::vector<std::string>{});
    if (vocab.empty()) vocab = {"something", "anything", "matter", "reason"};
    return std::make_shared<PerturbingGenerator>(
        spec.options.value("seed", rng_seed), vocab);
  }
  if (spec.type == "scripted") {
    auto gen = std::make_shared<ScriptedGenerator>();
    for (const auto& r : spec.options.value("responses", json::array())) {
      if (r.contains("operator")) {
        auto kind = operator_from_name(r.at("operator").get<std::string>());
        if (!kind) throw ConfigError("scripted generator: unknown operator");
        gen->enqueue(*kind, r.at("text").get<std::string>());
      } else {
        gen->enqueue_default(r.at("text").get<std::string>());
      }
    }
    return gen;
  }
  throw ConfigError("unknown prompt_generator type: " + spec.type);
}

}  // namespace

std::shared_ptr<ResponderBackend> build_responder(const BackendSpec& spec,
                                                  double rps) {
  if (spec.type == "http")
    return std::make_shared<HttpResponder>(parse_generator_config(spec.options, 0.7),
                                           rps);
  if (spec.type == "echo") return std::make_shared<EchoResponder>();
  throw ConfigError("unknown responder type: " + spec.type);
}

std::shared_ptr<ModerationBackend> build_moderation(const BackendSpec& spec,
                                                    double rps) {
  if (spec.type == "http") {
    ModerationConfig m;
    m.endpoint = spec.options.value("endpoint", "");
    m.api_key_env = spec.options.value("api_key_env", "PERSPECTIVE_API_KEY");
    m.retry.max_attempts = spec.options.value("retry_max_attempts", 3);
    m.retry.backoff_ms = spec.options.value("retry_backoff_ms", 250);
    return std::make_shared<HttpModerationClient>(m, rps);
  }
  if (spec.type == "lexicon") {
    std::map<std::string, double> terms;
    const json term_obj = spec.options.value("terms", json::object());
    for (const auto& [term, weight] : term_obj.items())
      terms[term] = weight.get<double>();
    return std::make_shared<LexiconModeration>(terms);
  }
  throw ConfigError("unknown moderation type: " + spec.type);
}

namespace {

std::shared_ptr<EmbedderBackend> build_embedder(const BackendSpec& spec, double rps) {
  if (spec.type == "http") {
    EmbedderConfig e;
    e.endpoint = spec.options.value("endpoint", "");
    e.model = spec.options.value("model", "all-MiniLM-L6-v2");
    e.retry.max_attempts = spec.options.value("retry_max_attempts", 3);
    e.retry.backoff_ms = spec.options.value("retry_backoff_ms", 250);
    return std::make_shared<HttpEmbedder>(e, rps);
  }
  if (spec.type == "hash")
    return std::make_shared<HashEmbedder>(spec.options.value("dim", 64));
  throw ConfigError("unknown embedder type: " + spec.type);
}

const BackendSpec& require_backend(const RunConfig& config, const std::string& role) {
  auto it = config.backends.find(role);
  if (it == config.backends.end())
    throw ConfigError("config missing backend role: " + role);
  return it->second;
}

}  // namespace

BackendSuite build_backend_suite(const RunConfig& config) {
  BackendSuite suite;
  suite.prompt_generator = build_prompt_generator(
      require_backend(config, "prompt_generator"), config.rng_seed,
      config.requests_per_second);
  suite.responder =
      build_responder(require_backend(config, "responder"), config.requests_per_second);
  suite.moderation = build_moderation(require_backend(config, "moderation"),
                                      config.requests_per_second);
  suite.embedder =
      build_embedder(require_backend(config, "embedder"), config.requests_per_second);
  return suite;
}

std::vector<std::string> ingest_seeds(
    const std::vector<std::filesystem::path>& files, int count,
    std::uint64_t rng_seed) {
  if (files.empty()) throw std::invalid_argument("ingest_seeds: no input files");
  std::vector<std::string> pool;
  std::unordered_set<std::string> seen;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open seed file: " + file.string());
    std::string line;
    while (std::getline(in, line)) {
      std::string text = collapse_whitespace(trim(line));
      if (text.empty() || text[0] == '#') continue;
      if (seen.insert(normalize_text(text)).second) pool.push_back(std::move(text));
    }
  }
  if (static_cast<int>(pool.size()) < count)
    throw std::runtime_error("seed pool has only " + std::to_string(pool.size()) +
                             " unique prompts, need " + std::to_string(count));
  std::mt19937_64 rng = substream(rng_seed, 0x5345454453ULL);  // "SEEDS"
  for (int k = 0; k < count; ++k) {
    size_t j = k + uniform_index(rng, pool.size() - k);
    std::swap(pool[k], pool[j]);
  }
  pool.resize(count);
  return pool;
}

namespace {

json genome_to_json(const PromptGenome& g) {
  return {{"id", g.id},
          {"text", g.text},
          {"toxicity", g.toxicity},
          {"generation_born", g.generation_born},
          {"operator", g.op},
          {"parent_ids", g.parent_ids},
          {"parent_baseline", g.parent_baseline},
          {"valid", g.valid}};
}

PromptGenome genome_from_json(const json& j) {
  PromptGenome g;
  g.id = j.at("id").get<std::uint64_t>();
  g.text = j.at("text").get<std::string>();
  g.toxicity = j.at("toxicity").get<double>();
  g.generation_born = j.at("generation_born").get<int>();
  g.op = j.at("operator").get<std::string>();
  g.parent_ids = j.at("parent_ids").get<std::vector<std::uint64_t>>();
  g.parent_baseline = j.at("parent_baseline").get<double>();
  g.valid = j.at("valid").get<bool>();
  return g;
}

struct Checkpoint {
  int generation = 0;  // last completed generation
  std::uint64_t next_id = 1;
  std::uint64_t rng_seed = 42;
  std::vector<PromptGenome> population;
  std::vector<double> controller_means;
  std::vector<double> controller_bests;
};

void write_checkpoint(const std::filesystem::path& file, const Checkpoint& cp) {
  json genomes = json::array();
  for (const auto& g : cp.population) genomes.push_back(genome_to_json(g));
  json j{{"generation", cp.generation},
         {"next_id", cp.next_id},
         {"rng_seed", cp.rng_seed},
         {"population", genomes},
         {"controller_means", cp.controller_means},
         {"controller_bests", cp.controller_bests}};
  std::ofstream out(file, std::ios::trunc);
  out << j.dump(2) << '\n';
}

Checkpoint read_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + file.string());
  json j;
  in >> j;
  Checkpoint cp;
  cp.generation = j.at("generation").get<int>();
  cp.next_id = j.at("next_id").get<std::uint64_t>();
  cp.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  for (const auto& g : j.at("population")) cp.population.push_back(genome_from_json(g));
  cp.controller_means = j.at("controller_means").get<std::vector<double>>();
  cp.controller_bests = j.at("controller_bests").get<std::vector<double>>();
  return cp;
}

double score_prompt(const std::string& text, const BackendSuite& backends) {
  std::string response = backends.responder->respond(text);
  return backends.moderation->moderate(response).toxicity();
}

std::vector<PromptGenome> elites_sorted_by_score(const TieredPopulation& pop) {
  std::vector<PromptGenome> elites = pop.elites;
  std::sort(elites.begin(), elites.end(), [](const auto& a, const auto& b) {
    if (a.toxicity != b.toxicity) return a.toxicity > b.toxicity;
    return a.id < b.id;
  });
  return elites;
}

}  // namespace

void check_backend_health(const BackendSuite& backends) {
  std::string unhealthy;
  auto probe = [&](auto& backend, const char* role) {
    if (backend && !backend->healthy()) {
      if (!unhealthy.empty()) unhealthy += ", ";
      unhealthy += std::string(role) + " (" + backend->name() + ")";
    }
  };
  probe(backends.prompt_generator, "prompt_generator");
  probe(backends.responder, "responder");
  probe(backends.moderation, "moderation");
  probe(backends.embedder, "embedder");
  if (!unhealthy.empty())
    throw BackendUnavailable("unhealthy backends: " + unhealthy);
}

RunResult run_evolution(const RunConfig& config, const BackendSuite& backends,
                        const std::vector<std::string>& seed_texts, bool resume) {
  check_backend_health(backends);
  std::filesystem::create_directories(config.output_dir);
  const auto log_path = config.output_dir / "run_log.jsonl";
  const auto checkpoint_path = config.output_dir / "checkpoint.json";
  const auto elites_path = config.output_dir / "elites.json";

  TemplateSet templates = config.assets_dir.empty()
                              ? TemplateSet()
                              : TemplateSet(config.assets_dir);
  Taxonomy concepts = config.assets_dir.empty()
                          ? builtin_concept_taxonomy()
                          : load_concept_taxonomy(config.assets_dir);
  Taxonomy styles = config.assets_dir.empty() ? builtin_style_taxonomy()
                                              : load_style_taxonomy(config.assets_dir);
  Taxonomy typos = config.assets_dir.empty() ? builtin_typo_taxonomy()
                                             : load_typo_taxonomy(config.assets_dir);
  RuleBasedTagger tagger;
  std::vector<std::string> patterns =
      config.refusal_patterns_file
          ? load_refusal_patterns(*config.refusal_patterns_file)
          : default_refusal_patterns();

  OperatorContext ctx;
  ctx.templates = &templates;
  ctx.concepts = &concepts;
  ctx.styles = &styles;
  ctx.typos = &typos;
  ctx.tagger = &tagger;
  ctx.pivot_language = config.pivot_language;
  ctx.mask_count = config.mask_count;
  ctx.similarity_threshold = config.similarity_threshold;

  Controller controller(config.window, config.tau_slope);
  TieredPopulation pop;
  std::uint64_t next_id = 1;
  int start_generation = 1;

  if (resume) {
    Checkpoint cp = read_checkpoint(checkpoint_path);
    if (cp.rng_seed != config.rng_seed)
      throw ConfigError("checkpoint rng_seed does not match config");
    pop = tier(cp.population, config.alpha, config.beta);
    pop.underperforming.clear();  // retained pool is E u N
    next_id = cp.next_id;
    controller.restore(cp.controller_means, cp.controller_bests);
    start_generation = cp.generation + 1;
  }

  RunLogWriter log(log_path, resume);

  if (!resume) {
    if (seed_texts.empty()) throw std::runtime_error("no seed prompts");
    // Step 1: score the initial population
    std::vector<PromptGenome> seeds;
    for (const auto& text : seed_texts) {
      PromptGenome g;
      g.id = next_id++;
      g.text = text;
      g.toxicity = score_prompt(text, backends);
      g.generation_born = 0;
      seeds.push_back(std::move(g));
    }
    pop = tier(seeds, config.alpha, config.beta);

    GenerationRecord gen0;
    gen0.generation = 0;
    gen0.mode = std::string(mode_name(Mode::Default));
    gen0.mean_fitness = mean_toxicity(seeds);
    gen0.best_score = pop.best_score();
    controller.observe(gen0.mean_fitness, gen0.best_score);
    gen0.window_means.assign(controller.mean_history().begin(),
                             controller.mean_history().end());
    gen0.window_bests.assign(controller.best_history().begin(),
                             controller.best_history().end());

    for (const auto& g : seeds) {
      ChildRecord r;
      r.generation = 0;
      r.id = g.id;
      r.op = g.op;
      r.parent_baseline = g.toxicity;
      r.text = g.text;
      r.toxicity = g.toxicity;
      r.status = "valid";
      Tier t = classify_tier(g.toxicity, pop.thresholds);
      r.tier = std::string(tier_name(t));
      r.removed = (t == Tier::Underperforming);
      r.mode = gen0.mode;
      log.write(r);
    }
    log.write(gen0);

    pop.underperforming.clear();  // cull the bottom tier

    Checkpoint cp;
    cp.generation = 0;
    cp.next_id = next_id;
    cp.rng_seed = config.rng_seed;
    cp.population = pop.all();
    cp.controller_means.assign(controller.mean_history().begin(),
                               controller.mean_history().end());
    cp.controller_bests.assign(controller.best_history().begin(),
                               controller.best_history().end());
    write_checkpoint(checkpoint_path, cp);
    log.flush();
  }

  // Step 2: evolution loop
  for (int g = start_generation; g <= config.generations; ++g) {
    Mode mode = controller.select_mode();
    double slope = controller.current_slope();

    std::mt19937_64 parent_rng = substream(config.rng_seed, g, 0x504152ULL);
    ParentSelection selection =
        select_parents(mode, pop.elites, pop.non_elites, parent_rng);

    std::unordered_set<std::string> existing;
    for (const auto& gen : pop.all()) existing.insert(normalize_text(gen.text));

    SpawnConfig spawn_config;
    spawn_config.generation = g;
    spawn_config.mode = std::string(mode_name(mode));
    spawn_config.fallback_sampling = selection.fallback_used;
    spawn_config.master_seed = config.rng_seed;
    spawn_config.enabled = config.operators;

    SpawnOutcome outcome =
        spawn_children(selection.parents, elites_sorted_by_score(pop), backends,
                       ctx, patterns, existing, next_id, spawn_config);

    // controller trend: mean over the pre-redistribution valid pool
    const double pool_mean =
        mean_toxicity(snapshot_valid_pool(pop, outcome.children));

    IntegrationResult integrated = integrate_children(pop, outcome.children);
    pop = std::move(integrated.population);

    for (auto& rec : outcome.records) {
      if (rec.status != "valid") continue;
      for (const auto& placement : integrated.placements) {
        if (placement.id == rec.id) {
          if (placement.duplicate) {
            rec.status = "duplicate";
            rec.cause = "duplicate at integration";
            rec.toxicity.reset();
          } else {
            rec.tier = std::string(tier_name(placement.tier));
            rec.removed = placement.removed;
          }
          break;
        }
      }
    }
    for (const auto& rec : outcome.records) log.write(rec);

    controller.observe(pool_mean, pop.best_score());

    GenerationRecord gen_record;
    gen_record.generation = g;
    gen_record.mode = std::string(mode_name(mode));
    if (!std::isnan(slope)) gen_record.slope = slope;
    gen_record.mean_fitness = pool_mean;
    gen_record.best_score = pop.best_score();
    gen_record.attempted = outcome.attempted;
    gen_record.skipped = outcome.skipped;
    gen_record.window_means.assign(controller.mean_history().begin(),
                                   controller.mean_history().end());
    gen_record.window_bests.assign(controller.best_history().begin(),
                                   controller.best_history().end());
    log.write(gen_record);
    log.flush();

    Checkpoint cp;
    cp.generation = g;
    cp.next_id = next_id;
    cp.rng_seed = config.rng_seed;
    cp.population = pop.all();
    cp.controller_means = gen_record.window_means;
    cp.controller_bests = gen_record.window_bests;
    write_checkpoint(checkpoint_path, cp);
  }

  RunResult result;
  result.elites = pop.elites;
  result.best_score = pop.best_score();
  result.generations_completed = config.generations;

  json elites_json = json::array();
  for (const auto& e : elites_sorted_by_score(pop))
    elites_json.push_back(genome_to_json(e));
  std::ofstream out(elites_path, std::ios::trunc);
  out << elites_json.dump(2) << '\n';

  return result;
}

RunResult run_evolution(const RunConfig& config, bool resume) {
  BackendSuite backends = build_backend_suite(config);
  std::vector<std::string> seeds;
  if (!resume)
    seeds = ingest_seeds(config.seed_files, config.seed_count, config.rng_seed);
  return run_evolution(config, backends, seeds, resume);
}

}  // namespace toxsearch
