#pragma once

#include <optional>
#include <string>
#include <vector>

#include "toxsearch/genome.hpp"

namespace toxsearch {

// Ratio thresholds keyed to the current best score:
//   tau_e = (1 - alpha/100) * s_max, tau_r = (beta/100) * s_max.
struct TierThresholds {
  double s_max = 0.0;
  double tau_e = 0.0;
  double tau_r = 0.0;
  double alpha = 30.0;
  double beta = 3.0;
};

TierThresholds compute_thresholds(double s_max, double alpha, double beta);

enum class Tier { Elite, NonElite, Underperforming };

std::string_view tier_name(Tier t);

// Elite test applies first so that the maximum is always elite, then the
// inclusive removal test (s <= tau_r), then non-elite.
Tier classify_tier(double score, const TierThresholds& th);

struct TieredPopulation {
  std::vector<PromptGenome> elites;
  std::vector<PromptGenome> non_elites;
  std::vector<PromptGenome> underperforming;
  TierThresholds thresholds;

  size_t size() const {
    return elites.size() + non_elites.size() + underperforming.size();
  }
  std::vector<PromptGenome> all() const;
  double best_score() const { return thresholds.s_max; }
};

// Partitions a non-empty set of valid genomes; s_max is the max toxicity
// over the input.
TieredPopulation tier(const std::vector<PromptGenome>& genomes, double alpha,
                      double beta);

struct ChildPlacement {
  std::uint64_t id = 0;
  Tier tier = Tier::NonElite;
  bool removed = false;     // tiered underperforming and culled
  bool duplicate = false;   // normalized text collision, not inserted
};

struct IntegrationResult {
  TieredPopulation population;  // E u N only; U removed
  std::vector<ChildPlacement> placements;
  std::vector<PromptGenome> removed;  // everything culled this step
};

// Steady-state update: union of retained pool and (deduplicated) children,
// re-tier with the recomputed s_max, cull underperformers.
IntegrationResult integrate_children(const TieredPopulation& pop,
                                     const std::vector<PromptGenome>& children);

// Pre-redistribution valid pool: retained genomes plus this generation's
// valid children, before underperformers are culled. Drives the
// controller's mean-fitness trend.
std::vector<PromptGenome> snapshot_valid_pool(
    const TieredPopulation& pop, const std::vector<PromptGenome>& children);

double mean_toxicity(const std::vector<PromptGenome>& genomes);

}  // namespace toxsearch
