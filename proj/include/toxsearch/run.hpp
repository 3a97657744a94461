#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "toxsearch/backends.hpp"
#include "toxsearch/genome.hpp"
#include "toxsearch/operators.hpp"
#include "toxsearch/population.hpp"
#include "toxsearch/runlog.hpp"
#include "toxsearch/transfer.hpp"

namespace toxsearch {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// "lexicon" / "echo" / "perturbing" / "scripted" select the in-process
// simulators; "http" selects the wire clients.
struct BackendSpec {
  std::string type;
  nlohmann::json options = nlohmann::json::object();
};

struct TransferTargetSpec {
  std::string name;
  BackendSpec responder;
  BackendSpec moderation;
};

struct RunConfig {
  int generations = 50;
  double alpha = 30.0;
  double beta = 3.0;
  int window = 5;
  double tau_slope = 1e-3;
  int seed_count = 100;
  std::uint64_t rng_seed = 42;
  std::vector<std::filesystem::path> seed_files;
  std::vector<OperatorKind> operators = default_operator_set();
  std::string pivot_language = "Hindi";
  int mask_count = 1;
  double similarity_threshold = 0.5;
  std::filesystem::path output_dir = "out";
  std::filesystem::path assets_dir;  // empty = embedded assets
  std::optional<std::filesystem::path> refusal_patterns_file;
  std::map<std::string, BackendSpec> backends;  // prompt_generator, responder,
                                                // moderation, embedder
  std::vector<TransferTargetSpec> transfer_targets;
  double requests_per_second = 0.0;  // HTTP pacing; 0 disables
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& file);
nlohmann::json run_config_to_json(const RunConfig& config);

// Instantiates the four backend roles from the config specs.
BackendSuite build_backend_suite(const RunConfig& config);
std::shared_ptr<ResponderBackend> build_responder(const BackendSpec& spec,
                                                  double requests_per_second);
std::shared_ptr<ModerationBackend> build_moderation(const BackendSpec& spec,
                                                    double requests_per_second);

// Throws BackendUnavailable naming every role that fails its health probe.
void check_backend_health(const BackendSuite& backends);

// Normalize, dedupe, then sample `count` uniformly without replacement.
std::vector<std::string> ingest_seeds(
    const std::vector<std::filesystem::path>& files, int count,
    std::uint64_t rng_seed);

struct RunResult {
  std::vector<PromptGenome> elites;
  double best_score = 0.0;
  int generations_completed = 0;
};

// Executes Algorithm-style evolution: seed scoring and tiering, then G
// generations of mode-select / parent-select / spawn / score / integrate,
// checkpointing at each generation barrier. Writes run_log.jsonl,
// checkpoint.json and elites.json under config.output_dir.
RunResult run_evolution(const RunConfig& config, const BackendSuite& backends,
                        const std::vector<std::string>& seed_texts,
                        bool resume = false);

// Convenience: builds backends from config, ingests seeds from
// config.seed_files.
RunResult run_evolution(const RunConfig& config, bool resume = false);

}  // namespace toxsearch
