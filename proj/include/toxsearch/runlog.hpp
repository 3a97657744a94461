#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "toxsearch/genome.hpp"

namespace toxsearch {

// One run-log line per attempted child (and per seed, with op "seed").
// Status values: valid / refusal / non_question / malformed / duplicate /
// skipped. Skipped attempts (operator had nothing to do) are excluded
// from the attempted base used by the metrics.
struct ChildRecord {
  int generation = 0;
  std::uint64_t id = 0;  // 0 when the child never became a genome
  std::string op;        // operator name or "seed"
  std::vector<std::uint64_t> parent_ids;
  double parent_baseline = 0.0;
  std::string text;
  std::optional<double> toxicity;  // set only for scored (valid) children
  std::string status;
  std::string cause;
  std::optional<std::string> tier;  // elite / non_elite / underperforming
  bool removed = false;             // culled as underperforming at insertion
  bool fallback_sampling = false;   // parent selection fell back (degenerate pairs)
  std::string mode;                 // controller mode when spawned
};

// Per-generation summary line carrying the controller decision.
struct GenerationRecord {
  int generation = 0;
  std::string mode;
  std::optional<double> slope;
  double mean_fitness = 0.0;  // over the pre-redistribution valid pool
  double best_score = 0.0;
  int attempted = 0;
  int skipped = 0;
  std::vector<double> window_means;
  std::vector<double> window_bests;
};

nlohmann::json to_json(const ChildRecord& r);
nlohmann::json to_json(const GenerationRecord& r);
ChildRecord child_record_from_json(const nlohmann::json& j);
GenerationRecord generation_record_from_json(const nlohmann::json& j);

struct RunLog {
  std::vector<ChildRecord> children;
  std::vector<GenerationRecord> generations;
};

// JSONL: each line is {"type":"child",...} or {"type":"generation",...}.
class RunLogWriter {
 public:
  explicit RunLogWriter(const std::filesystem::path& file, bool append = false);
  ~RunLogWriter();
  void write(const ChildRecord& r);
  void write(const GenerationRecord& r);
  void flush();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

RunLog read_run_log(const std::filesystem::path& file);

}  // namespace toxsearch
