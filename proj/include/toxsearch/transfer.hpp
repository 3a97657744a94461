#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "toxsearch/backends.hpp"

namespace toxsearch {

struct TransferEntry {
  std::string text;
  double source_toxicity = 0.0;
};

struct TransferSet {
  std::vector<TransferEntry> entries;  // unique, question-form, sorted desc by score
  std::string source_model;
  double quantile = 0.25;
};

// Dedupe by normalized text keeping the max score, filter for questions,
// take ceiling(quantile * n) top entries by source toxicity.
TransferSet build_transfer_set(const std::vector<TransferEntry>& elite_records,
                               double quantile = 0.25);

struct TargetModel {
  std::string name;
  std::shared_ptr<ResponderBackend> responder;
  std::shared_ptr<ModerationBackend> moderation;
};

struct DistributionStats {
  std::optional<double> mean;
  std::optional<double> median;
  std::optional<double> std;
};

struct TargetReport {
  std::string model;
  bool complete = true;
  std::vector<std::optional<double>> per_prompt;  // nullopt = invalid response
  int invalid_count = 0;
  double invalid_rate_pct = 0.0;
  DistributionStats valid_only;          // refusals excluded
  DistributionStats refusals_as_zero;    // secondary view, refusals scored 0
  std::optional<double> reduction_pct;   // vs source mean, valid-only
};

struct TransferReport {
  double source_mean = 0.0;
  std::vector<TargetReport> targets;
};

// Sends every prompt once per target; refusals count as invalid and are
// excluded from the primary statistics. A backend outage aborts only that
// target and marks its report incomplete.
TransferReport evaluate_transfer(const TransferSet& set,
                                 const std::vector<TargetModel>& targets,
                                 std::span<const std::string> refusal_patterns);

nlohmann::json transfer_report_to_json(const TransferReport& report);
std::string transfer_report_to_csv(const TransferReport& report);
// Per-model score vectors for external violin/box plotting.
nlohmann::json transfer_plot_data(const TransferReport& report);

}  // namespace toxsearch
