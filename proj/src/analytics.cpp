#include "toxsearch/analytics.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "toxsearch/rng.hpp"

namespace toxsearch {

using nlohmann::json;

OperatorMetrics compute_operator_metrics(const std::vector<ChildRecord>& records,
                                         const std::string& op) {
  OperatorMetrics m;
  m.op = op;
  std::vector<double> deltas;
  for (const auto& r : records) {
    if (r.op != op || r.status == "skipped") continue;
    ++m.attempted;
    if (r.status == "duplicate") {
      ++m.duplicate;
    } else if (r.status != "valid") {
      ++m.invalid;
    } else {
      if (r.tier == "elite") ++m.elite_hits;
      else if (r.tier == "non_elite") ++m.non_elite_insertions;
      else if (r.tier == "underperforming") ++m.underperforming;
      if (r.toxicity) deltas.push_back(*r.toxicity - r.parent_baseline);
    }
  }
  if (m.attempted > 0) {
    const double base = static_cast<double>(m.attempted);
    m.ne = 100.0 * m.non_elite_insertions / base;
    m.ehr = 100.0 * m.elite_hits / base;
    m.ir = 100.0 * m.invalid / base;
    const int conditional = m.attempted - m.invalid - m.duplicate;
    if (conditional > 0) m.cehr = 100.0 * m.elite_hits / conditional;
  }
  if (!deltas.empty()) {
    m.delta_mu = mean(deltas);
    m.delta_sigma = stddev(deltas);
  }
  return m;
}

std::vector<OperatorMetrics> compute_all_operator_metrics(
    const std::vector<ChildRecord>& records) {
  std::vector<OperatorMetrics> out;
  for (OperatorKind kind : all_operators())
    out.push_back(compute_operator_metrics(records, std::string(operator_name(kind))));
  return out;
}

namespace {

std::optional<double> metric_value(const OperatorMetrics& m, const std::string& name) {
  if (name == "ne") return m.ne;
  if (name == "ehr") return m.ehr;
  if (name == "ir") return m.ir;
  if (name == "cehr") return m.cehr;
  if (name == "delta_mu") return m.delta_mu;
  if (name == "delta_sigma") return m.delta_sigma;
  return std::nullopt;
}

}  // namespace

std::vector<MetricBattery> run_statistical_battery(
    const std::vector<std::vector<OperatorMetrics>>& runs, double base_alpha,
    int bootstrap_iterations, std::uint64_t seed) {
  // collect the operator names present across runs, in first-seen order
  std::vector<std::string> ops;
  for (const auto& run : runs) {
    for (const auto& m : run) {
      if (std::find(ops.begin(), ops.end(), m.op) == ops.end()) ops.push_back(m.op);
    }
  }

  std::vector<MetricBattery> out;
  for (const std::string metric :
       {"ne", "ehr", "ir", "cehr", "delta_mu", "delta_sigma"}) {
    // per-operator samples of the metric value, one per run
    std::vector<std::string> group_ops;
    std::vector<std::vector<double>> groups;
    for (const auto& op : ops) {
      std::vector<double> samples;
      for (const auto& run : runs) {
        for (const auto& m : run) {
          if (m.op != op) continue;
          if (auto v = metric_value(m, metric)) samples.push_back(*v);
        }
      }
      if (!samples.empty()) {
        group_ops.push_back(op);
        groups.push_back(std::move(samples));
      }
    }
    if (groups.size() < 2) continue;

    MetricBattery battery;
    battery.metric = metric;
    battery.kruskal = kruskal_wallis(groups);
    battery.kruskal.significant = battery.kruskal.p_value < base_alpha;
    const int n_pairs =
        static_cast<int>(group_ops.size() * (group_ops.size() - 1) / 2);
    battery.corrected_alpha = bonferroni_alpha(base_alpha, n_pairs);

    if (battery.kruskal.significant) {
      int pair_index = 0;
      for (size_t i = 0; i < groups.size(); ++i) {
        for (size_t j = i + 1; j < groups.size(); ++j, ++pair_index) {
          PairwiseComparison cmp;
          cmp.op_a = group_ops[i];
          cmp.op_b = group_ops[j];
          cmp.result = mann_whitney_u(groups[i], groups[j]);
          cmp.result.significant = cmp.result.p_value < battery.corrected_alpha;
          // bootstrap the difference in group means
          if (groups[i].size() >= 2 && groups[j].size() >= 2) {
            const auto& ga = groups[i];
            const auto& gb = groups[j];
            std::vector<double> indices(ga.size() + gb.size());
            std::mt19937_64 rng =
                substream(seed, std::hash<std::string>{}(metric), pair_index);
            // resample each group independently
            std::vector<double> diffs;
            diffs.reserve(bootstrap_iterations);
            for (int it = 0; it < bootstrap_iterations; ++it) {
              double ma = 0.0, mb = 0.0;
              for (size_t k = 0; k < ga.size(); ++k)
                ma += ga[uniform_index(rng, ga.size())];
              for (size_t k = 0; k < gb.size(); ++k)
                mb += gb[uniform_index(rng, gb.size())];
              diffs.push_back(ma / ga.size() - mb / gb.size());
            }
            std::sort(diffs.begin(), diffs.end());
            auto q = [&](double p) {
              double pos = p * (diffs.size() - 1);
              size_t lo = static_cast<size_t>(pos);
              size_t hi = std::min(lo + 1, diffs.size() - 1);
              return diffs[lo] + (diffs[hi] - diffs[lo]) * (pos - lo);
            };
            cmp.result.ci_low = q(0.025);
            cmp.result.ci_high = q(0.975);
          }
          battery.pairwise.push_back(std::move(cmp));
        }
      }
    }
    out.push_back(std::move(battery));
  }
  return out;
}

namespace {
json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string fmt(const std::optional<double>& v) {
  if (!v) return "NA";
  std::ostringstream s;
  s << *v;
  return s.str();
}
}  // namespace

json metrics_to_json(const std::vector<OperatorMetrics>& metrics) {
  json arr = json::array();
  for (const auto& m : metrics) {
    arr.push_back({{"operator", m.op},
                   {"attempted", m.attempted},
                   {"elite_hits", m.elite_hits},
                   {"non_elite_insertions", m.non_elite_insertions},
                   {"underperforming", m.underperforming},
                   {"invalid", m.invalid},
                   {"duplicate", m.duplicate},
                   {"NE", opt(m.ne)},
                   {"EHR", opt(m.ehr)},
                   {"IR", opt(m.ir)},
                   {"cEHR", opt(m.cehr)},
                   {"delta_mu", opt(m.delta_mu)},
                   {"delta_sigma", opt(m.delta_sigma)}});
  }
  return arr;
}

std::string metrics_to_csv(const std::vector<OperatorMetrics>& metrics) {
  std::ostringstream out;
  out << "operator,NE,EHR,IR,cEHR,delta_mu,delta_sigma\n";
  for (const auto& m : metrics) {
    out << m.op << ',' << fmt(m.ne) << ',' << fmt(m.ehr) << ',' << fmt(m.ir)
        << ',' << fmt(m.cehr) << ',' << fmt(m.delta_mu) << ','
        << fmt(m.delta_sigma) << '\n';
  }
  return out.str();
}

json battery_to_json(const std::vector<MetricBattery>& batteries) {
  json arr = json::array();
  for (const auto& b : batteries) {
    json pairwise = json::array();
    for (const auto& c : b.pairwise) {
      pairwise.push_back({{"op_a", c.op_a},
                          {"op_b", c.op_b},
                          {"U", c.result.statistic},
                          {"p_value", c.result.p_value},
                          {"effect_size_r", c.result.effect_size_r},
                          {"ci_low", opt(c.result.ci_low)},
                          {"ci_high", opt(c.result.ci_high)},
                          {"significant", c.result.significant}});
    }
    arr.push_back({{"metric", b.metric},
                   {"kruskal_h", b.kruskal.statistic},
                   {"kruskal_p", b.kruskal.p_value},
                   {"kruskal_significant", b.kruskal.significant},
                   {"corrected_alpha", b.corrected_alpha},
                   {"pairwise", pairwise}});
  }
  return arr;
}

}  // namespace toxsearch
