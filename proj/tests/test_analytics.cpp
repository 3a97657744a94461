#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "toxsearch/analytics.hpp"
#include "toxsearch/rng.hpp"

using namespace toxsearch;

namespace {

ChildRecord rec(const std::string& op, const std::string& status,
                const std::string& tier = "", double toxicity = 0.0,
                double baseline = 0.0) {
  ChildRecord r;
  r.op = op;
  r.status = status;
  if (!tier.empty()) r.tier = tier;
  if (status == "valid") r.toxicity = toxicity;
  r.parent_baseline = baseline;
  return r;
}

}  // namespace

TEST_CASE("worked example: 10 attempts") {
  // 1 invalid, 1 duplicate, 1 elite, 5 non-elite, 2 underperforming
  std::vector<ChildRecord> records;
  records.push_back(rec("negation", "refusal"));
  records.push_back(rec("negation", "duplicate"));
  records.push_back(rec("negation", "valid", "elite", 0.9, 0.5));
  for (int i = 0; i < 5; ++i)
    records.push_back(rec("negation", "valid", "non_elite", 0.4, 0.5));
  for (int i = 0; i < 2; ++i)
    records.push_back(rec("negation", "valid", "underperforming", 0.01, 0.5));

  auto m = compute_operator_metrics(records, "negation");
  CHECK(m.attempted == 10);
  CHECK(*m.ir == doctest::Approx(10.0));
  CHECK(*m.ehr == doctest::Approx(10.0));
  CHECK(*m.ne == doctest::Approx(50.0));
  CHECK(*m.cehr == doctest::Approx(12.5));  // 1 / (10 - 1 - 1)
}

TEST_CASE("delta baselines") {
  std::vector<ChildRecord> records;
  records.push_back(rec("paraphrasing", "valid", "non_elite", 0.30, 0.36));
  auto m = compute_operator_metrics(records, "paraphrasing");
  CHECK(*m.delta_mu == doctest::Approx(-0.06));

  // crossover: baseline is the mean of the two parents
  std::vector<ChildRecord> xr;
  xr.push_back(rec("semantic_fusion_crossover", "valid", "elite", 0.50,
                   (0.40 + 0.60) / 2.0));
  auto mx = compute_operator_metrics(xr, "semantic_fusion_crossover");
  CHECK(*mx.delta_mu == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("zero attempts leave metrics unset") {
  auto m = compute_operator_metrics({}, "negation");
  CHECK(m.attempted == 0);
  CHECK_FALSE(m.ne.has_value());
  CHECK_FALSE(m.ehr.has_value());
  CHECK_FALSE(m.ir.has_value());
  CHECK_FALSE(m.cehr.has_value());
  CHECK_FALSE(m.delta_mu.has_value());
}

TEST_CASE("cehr denominator can vanish independently of attempts") {
  std::vector<ChildRecord> records;
  records.push_back(rec("negation", "refusal"));
  records.push_back(rec("negation", "duplicate"));
  auto m = compute_operator_metrics(records, "negation");
  CHECK(m.attempted == 2);
  CHECK_FALSE(m.cehr.has_value());
  CHECK(*m.ir == doctest::Approx(50.0));
}

TEST_CASE("skipped attempts are excluded from the attempted base") {
  std::vector<ChildRecord> records;
  records.push_back(rec("negation", "skipped"));
  records.push_back(rec("negation", "valid", "elite", 0.9, 0.5));
  auto m = compute_operator_metrics(records, "negation");
  CHECK(m.attempted == 1);
  CHECK(*m.ehr == doctest::Approx(100.0));
}

TEST_CASE("count identity holds on 1000 synthetic run logs") {
  std::mt19937_64 rng = substream(555, 0);
  const char* statuses[] = {"valid", "refusal", "malformed",
                            "non_question", "duplicate"};
  const char* tiers[] = {"elite", "non_elite", "underperforming"};
  for (int log_i = 0; log_i < 1000; ++log_i) {
    std::vector<ChildRecord> records;
    size_t n = 1 + uniform_index(rng, 60);
    for (size_t i = 0; i < n; ++i) {
      const char* status = statuses[uniform_index(rng, 5)];
      if (std::string(status) == "valid") {
        records.push_back(rec("negation", "valid", tiers[uniform_index(rng, 3)],
                              uniform_real(rng), uniform_real(rng)));
      } else {
        records.push_back(rec("negation", status));
      }
    }
    auto m = compute_operator_metrics(records, "negation");
    CHECK(m.elite_hits + m.non_elite_insertions + m.underperforming + m.invalid +
              m.duplicate ==
          m.attempted);
    if (m.cehr && m.ehr) CHECK(*m.cehr >= *m.ehr - 1e-9);
  }
}

TEST_CASE("csv emission follows the documented column order") {
  std::vector<ChildRecord> records;
  records.push_back(rec("negation", "valid", "elite", 0.8, 0.5));
  auto table = compute_all_operator_metrics(records);
  auto csv = metrics_to_csv(table);
  CHECK(csv.rfind("operator,NE,EHR,IR,cEHR,delta_mu,delta_sigma\n", 0) == 0);
  CHECK(csv.find("negation,0,100,0,100,") != std::string::npos);
  CHECK(csv.find("synonym_replacement,NA,NA,NA,NA,NA,NA") != std::string::npos);
}

TEST_CASE("battery runs kruskal-wallis then gated pairwise comparisons") {
  // two operators with clearly different EHR across 8 runs
  std::vector<std::vector<OperatorMetrics>> runs;
  for (int run = 0; run < 8; ++run) {
    std::vector<OperatorMetrics> table(2);
    table[0].op = "negation";
    table[0].ehr = 80.0 + run;
    table[0].ne = 10.0;
    table[1].op = "paraphrasing";
    table[1].ehr = 5.0 + run;
    table[1].ne = 10.0;
    runs.push_back(std::move(table));
  }
  auto batteries = run_statistical_battery(runs, 0.05, 500, 42);
  const MetricBattery* ehr = nullptr;
  const MetricBattery* ne = nullptr;
  for (const auto& b : batteries) {
    if (b.metric == "ehr") ehr = &b;
    if (b.metric == "ne") ne = &b;
  }
  REQUIRE(ehr != nullptr);
  CHECK(ehr->kruskal.significant);
  REQUIRE(ehr->pairwise.size() == 1);
  CHECK(ehr->pairwise[0].result.ci_low.has_value());
  CHECK(*ehr->pairwise[0].result.ci_low <= *ehr->pairwise[0].result.ci_high);
  CHECK(ehr->corrected_alpha == doctest::Approx(0.05));

  REQUIRE(ne != nullptr);
  CHECK_FALSE(ne->kruskal.significant);  // identical groups
  CHECK(ne->pairwise.empty());

  // determinism
  auto again = run_statistical_battery(runs, 0.05, 500, 42);
  CHECK(battery_to_json(batteries) == battery_to_json(again));
}

TEST_CASE("json emission carries NA as null") {
  std::vector<ChildRecord> records;
  records.push_back(rec("negation", "refusal"));
  auto table = compute_all_operator_metrics(records);
  auto j = metrics_to_json(table);
  bool found = false;
  for (const auto& row : j) {
    if (row.at("operator") == "negation") {
      found = true;
      CHECK(row.at("cEHR").is_null());
      CHECK(row.at("IR").get<double>() == doctest::Approx(100.0));
    }
  }
  CHECK(found);
}
