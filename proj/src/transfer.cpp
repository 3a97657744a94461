#include "toxsearch/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "toxsearch/stats.hpp"
#include "toxsearch/text.hpp"
#include "toxsearch/validity.hpp"

namespace toxsearch {

using nlohmann::json;

TransferSet build_transfer_set(const std::vector<TransferEntry>& elite_records,
                               double quantile) {
  if (elite_records.empty())
    throw std::invalid_argument("build_transfer_set: no elite records");
  if (!(quantile > 0.0 && quantile <= 1.0))
    throw std::invalid_argument("build_transfer_set: quantile outside (0,1]");

  // dedupe keeping the highest score per normalized text
  std::unordered_map<std::string, TransferEntry> best;
  for (const auto& e : elite_records) {
    std::string key = normalize_text(e.text);
    auto it = best.find(key);
    if (it == best.end() || e.source_toxicity > it->second.source_toxicity)
      best[key] = e;
  }

  std::vector<TransferEntry> unique;
  for (auto& [_, e] : best) {
    if (is_question(e.text)) unique.push_back(std::move(e));
  }
  std::sort(unique.begin(), unique.end(), [](const auto& a, const auto& b) {
    if (a.source_toxicity != b.source_toxicity)
      return a.source_toxicity > b.source_toxicity;
    return a.text < b.text;  // stable selection for equal scores
  });

  const size_t take = static_cast<size_t>(
      std::ceil(quantile * static_cast<double>(unique.size())));
  TransferSet set;
  set.quantile = quantile;
  set.entries.assign(unique.begin(),
                     unique.begin() + std::min(take, unique.size()));
  return set;
}

namespace {

DistributionStats stats_of(const std::vector<double>& scores) {
  DistributionStats s;
  if (scores.empty()) return s;
  s.mean = mean(scores);
  s.median = median(scores);
  s.std = stddev(scores);
  return s;
}

}  // namespace

TransferReport evaluate_transfer(const TransferSet& set,
                                 const std::vector<TargetModel>& targets,
                                 std::span<const std::string> refusal_patterns) {
  TransferReport report;
  {
    std::vector<double> src;
    for (const auto& e : set.entries) src.push_back(e.source_toxicity);
    report.source_mean = mean(src);
  }

  for (const auto& target : targets) {
    TargetReport tr;
    tr.model = target.name;
    std::vector<double> valid_scores;
    std::vector<double> zero_filled;
    try {
      for (const auto& entry : set.entries) {
        std::string response = target.responder->respond(entry.text);
        if (is_refusal(response, refusal_patterns)) {
          tr.per_prompt.push_back(std::nullopt);
          ++tr.invalid_count;
          zero_filled.push_back(0.0);
          continue;
        }
        double score = target.moderation->moderate(response).toxicity();
        tr.per_prompt.push_back(score);
        valid_scores.push_back(score);
        zero_filled.push_back(score);
      }
    } catch (const BackendUnavailable&) {
      tr.complete = false;
    }
    if (!set.entries.empty())
      tr.invalid_rate_pct =
          100.0 * tr.invalid_count / static_cast<double>(set.entries.size());
    tr.valid_only = stats_of(valid_scores);
    tr.refusals_as_zero = stats_of(zero_filled);
    if (tr.valid_only.mean && report.source_mean > 0.0) {
      tr.reduction_pct =
          (report.source_mean - *tr.valid_only.mean) / report.source_mean * 100.0;
    }
    report.targets.push_back(std::move(tr));
  }
  return report;
}

namespace {
json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json dist(const DistributionStats& s) {
  return {{"mean", opt(s.mean)}, {"median", opt(s.median)}, {"std", opt(s.std)}};
}
}  // namespace

json transfer_report_to_json(const TransferReport& report) {
  json targets = json::array();
  for (const auto& t : report.targets) {
    json per_prompt = json::array();
    for (const auto& s : t.per_prompt) per_prompt.push_back(opt(s));
    targets.push_back({{"model", t.model},
                       {"complete", t.complete},
                       {"invalid_count", t.invalid_count},
                       {"invalid_rate_pct", t.invalid_rate_pct},
                       {"valid_only", dist(t.valid_only)},
                       {"refusals_as_zero", dist(t.refusals_as_zero)},
                       {"reduction_pct", opt(t.reduction_pct)},
                       {"per_prompt", per_prompt}});
  }
  return {{"source_mean", report.source_mean}, {"targets", targets}};
}

std::string transfer_report_to_csv(const TransferReport& report) {
  std::ostringstream out;
  out << "model,complete,mean,median,std,mean_refusals_zero,invalid_count,"
         "invalid_rate_pct,reduction_pct\n";
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("NA");
    std::ostringstream s;
    s << *v;
    return s.str();
  };
  for (const auto& t : report.targets) {
    out << t.model << ',' << (t.complete ? "true" : "false") << ','
        << fmt(t.valid_only.mean) << ',' << fmt(t.valid_only.median) << ','
        << fmt(t.valid_only.std) << ',' << fmt(t.refusals_as_zero.mean) << ','
        << t.invalid_count << ',' << t.invalid_rate_pct << ','
        << fmt(t.reduction_pct) << '\n';
  }
  return out.str();
}

json transfer_plot_data(const TransferReport& report) {
  json models = json::object();
  for (const auto& t : report.targets) {
    json scores = json::array();
    for (const auto& s : t.per_prompt) {
      if (s) scores.push_back(*s);
    }
    models[t.model] = scores;
  }
  return models;
}

}  // namespace toxsearch
