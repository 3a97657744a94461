#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "toxsearch/runlog.hpp"
#include "toxsearch/stats.hpp"

namespace toxsearch {

// Per-operator rates over attempted children. Rates in percent;
// delta_mu / delta_sigma on the score scale over valid children. Fields
// are empty when the denominator is zero.
struct OperatorMetrics {
  std::string op;
  int attempted = 0;
  int elite_hits = 0;
  int non_elite_insertions = 0;
  int underperforming = 0;
  int invalid = 0;
  int duplicate = 0;
  std::optional<double> ne;
  std::optional<double> ehr;
  std::optional<double> ir;
  std::optional<double> cehr;
  std::optional<double> delta_mu;
  std::optional<double> delta_sigma;
};

// Counts and rates for one operator over a run log. Baseline for delta is
// the record's parent_baseline (parent score for mutations, mean of the
// parents for crossovers, best exemplar for informed evolution).
OperatorMetrics compute_operator_metrics(const std::vector<ChildRecord>& records,
                                         const std::string& op);

std::vector<OperatorMetrics> compute_all_operator_metrics(
    const std::vector<ChildRecord>& records);

// One Kruskal-Wallis test across operators per metric; significant tests
// are followed by all pairwise Mann-Whitney comparisons under a
// Bonferroni-corrected alpha, with Cohen's r and a bootstrap CI of the
// difference in group means.
struct PairwiseComparison {
  std::string op_a;
  std::string op_b;
  TestResult result;
};

struct MetricBattery {
  std::string metric;  // "ne", "ehr", "ir", "cehr", "delta_mu", "delta_sigma"
  TestResult kruskal;
  double corrected_alpha = 0.05;
  std::vector<PairwiseComparison> pairwise;  // empty when KW not significant
};

// `runs` holds one metric table per repeated run; groups are per-operator
// samples of the metric value across runs.
std::vector<MetricBattery> run_statistical_battery(
    const std::vector<std::vector<OperatorMetrics>>& runs, double base_alpha = 0.05,
    int bootstrap_iterations = 1000, std::uint64_t seed = 42);

nlohmann::json metrics_to_json(const std::vector<OperatorMetrics>& metrics);
// Table 4 column order: operator, NE, EHR, IR, cEHR, delta_mu, delta_sigma.
std::string metrics_to_csv(const std::vector<OperatorMetrics>& metrics);
nlohmann::json battery_to_json(const std::vector<MetricBattery>& batteries);

}  // namespace toxsearch
