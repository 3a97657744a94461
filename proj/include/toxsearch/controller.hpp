#pragma once

#include <deque>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "toxsearch/genome.hpp"

namespace toxsearch {

enum class Mode { Default, Explore, Exploit };

std::string_view mode_name(Mode m);

// Exact least-squares slope of y against index 0..n-1.
double ols_slope(std::span<const double> values);

// Sliding-window mode controller. Observes (mean fitness over the valid
// pool, best score) once per generation; picks Exploit on a falling mean
// trend, Explore on best-score stagnation, Default otherwise. Before a
// full window accumulates it stays in Default.
class Controller {
 public:
  Controller(int window = 5, double tau_slope = 1e-3);

  void observe(double mean_fitness, double best_score);
  Mode select_mode() const;

  // Slope over the current window; NaN until two observations exist.
  double current_slope() const;
  bool has_full_window() const {
    return static_cast<int>(mean_history_.size()) >= window_;
  }
  bool stagnant() const;

  int window() const { return window_; }
  double tau_slope() const { return tau_slope_; }
  const std::deque<double>& mean_history() const { return mean_history_; }
  const std::deque<double>& best_history() const { return best_history_; }

  // Checkpoint support.
  void restore(const std::vector<double>& means, const std::vector<double>& bests);

 private:
  int window_;
  double tau_slope_;
  std::deque<double> mean_history_;
  std::deque<double> best_history_;
};

// Pure decision table over (slope, stagnant); exposed for exhaustive
// testing.
Mode decide_mode(double slope, bool stagnant, double tau_slope);

struct ParentSelection {
  std::vector<PromptGenome> parents;
  bool fallback_used = false;  // a tier was short and was sampled with replacement
};

// Default: 1 elite + 1 non-elite. Exploit: 2 elites + 1 non-elite.
// Explore: 1 elite + 2 non-elites. Uniform without replacement within a
// tier; a short tier falls back to sampling with replacement; an empty
// non-elite tier substitutes elites.
ParentSelection select_parents(Mode mode,
                               const std::vector<PromptGenome>& elites,
                               const std::vector<PromptGenome>& non_elites,
                               std::mt19937_64& rng);

}  // namespace toxsearch
