#include "toxsearch/population.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "toxsearch/text.hpp"

namespace toxsearch {

TierThresholds compute_thresholds(double s_max, double alpha, double beta) {
  if (!(s_max >= 0.0 && s_max <= 1.0))
    throw std::invalid_argument("compute_thresholds: s_max outside [0,1]");
  if (!(alpha > 0.0 && alpha < 100.0))
    throw std::invalid_argument("compute_thresholds: alpha outside (0,100)");
  if (!(beta >= 0.0 && beta < alpha))
    throw std::invalid_argument("compute_thresholds: requires 0 <= beta < alpha");
  TierThresholds th;
  th.s_max = s_max;
  th.alpha = alpha;
  th.beta = beta;
  th.tau_e = (1.0 - alpha / 100.0) * s_max;
  th.tau_r = (beta / 100.0) * s_max;
  return th;
}

std::string_view tier_name(Tier t) {
  switch (t) {
    case Tier::Elite: return "elite";
    case Tier::NonElite: return "non_elite";
    case Tier::Underperforming: return "underperforming";
  }
  return "unknown";
}

Tier classify_tier(double score, const TierThresholds& th) {
  if (score >= th.tau_e) return Tier::Elite;
  if (score <= th.tau_r) return Tier::Underperforming;
  return Tier::NonElite;
}

std::vector<PromptGenome> TieredPopulation::all() const {
  std::vector<PromptGenome> out;
  out.reserve(size());
  out.insert(out.end(), elites.begin(), elites.end());
  out.insert(out.end(), non_elites.begin(), non_elites.end());
  out.insert(out.end(), underperforming.begin(), underperforming.end());
  return out;
}

TieredPopulation tier(const std::vector<PromptGenome>& genomes, double alpha,
                      double beta) {
  if (genomes.empty())
    throw std::invalid_argument("tier: empty population");
  double s_max = 0.0;
  for (const auto& g : genomes) s_max = std::max(s_max, g.toxicity);
  TieredPopulation pop;
  pop.thresholds = compute_thresholds(s_max, alpha, beta);
  for (const auto& g : genomes) {
    switch (classify_tier(g.toxicity, pop.thresholds)) {
      case Tier::Elite: pop.elites.push_back(g); break;
      case Tier::NonElite: pop.non_elites.push_back(g); break;
      case Tier::Underperforming: pop.underperforming.push_back(g); break;
    }
  }
  auto by_id = [](const PromptGenome& a, const PromptGenome& b) {
    return a.id < b.id;
  };
  std::sort(pop.elites.begin(), pop.elites.end(), by_id);
  std::sort(pop.non_elites.begin(), pop.non_elites.end(), by_id);
  std::sort(pop.underperforming.begin(), pop.underperforming.end(), by_id);
  return pop;
}

IntegrationResult integrate_children(const TieredPopulation& pop,
                                     const std::vector<PromptGenome>& children) {
  std::vector<PromptGenome> pool = pop.all();
  std::unordered_set<std::string> texts;
  texts.reserve(pool.size() + children.size());
  for (const auto& g : pool) texts.insert(normalize_text(g.text));

  IntegrationResult result;
  std::vector<std::uint64_t> inserted_ids;
  for (const auto& c : children) {
    ChildPlacement p;
    p.id = c.id;
    std::string norm = normalize_text(c.text);
    if (!texts.insert(norm).second) {
      p.duplicate = true;
      result.placements.push_back(p);
      continue;
    }
    pool.push_back(c);
    inserted_ids.push_back(c.id);
    result.placements.push_back(p);
  }

  TieredPopulation retiered =
      tier(pool, pop.thresholds.alpha, pop.thresholds.beta);

  for (auto& p : result.placements) {
    if (p.duplicate) continue;
    // tier landed at insertion, under the recomputed thresholds
    for (const auto& c : children) {
      if (c.id == p.id) {
        p.tier = classify_tier(c.toxicity, retiered.thresholds);
        p.removed = (p.tier == Tier::Underperforming);
        break;
      }
    }
  }

  result.removed = std::move(retiered.underperforming);
  retiered.underperforming.clear();
  result.population = std::move(retiered);
  return result;
}

std::vector<PromptGenome> snapshot_valid_pool(
    const TieredPopulation& pop, const std::vector<PromptGenome>& children) {
  std::vector<PromptGenome> out = pop.all();
  for (const auto& c : children) {
    if (c.valid) out.push_back(c);
  }
  return out;
}

double mean_toxicity(const std::vector<PromptGenome>& genomes) {
  if (genomes.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& g : genomes) sum += g.toxicity;
  return sum / static_cast<double>(genomes.size());
}

}  // namespace toxsearch
