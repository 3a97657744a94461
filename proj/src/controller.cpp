#include "toxsearch/controller.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "toxsearch/rng.hpp"

namespace toxsearch {

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Default: return "default";
    case Mode::Explore: return "explore";
    case Mode::Exploit: return "exploit";
  }
  return "unknown";
}

double ols_slope(std::span<const double> values) {
  const size_t n = values.size();
  if (n < 2) throw std::invalid_argument("ols_slope: need at least 2 values");
  const double xbar = static_cast<double>(n - 1) / 2.0;
  double ybar = 0.0;
  for (double v : values) ybar += v;
  ybar /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - xbar;
    num += dx * (values[i] - ybar);
    den += dx * dx;
  }
  return num / den;
}

Controller::Controller(int window, double tau_slope)
    : window_(window), tau_slope_(tau_slope) {
  if (window < 2) throw std::invalid_argument("Controller: window must be >= 2");
}

void Controller::observe(double mean_fitness, double best_score) {
  mean_history_.push_back(mean_fitness);
  best_history_.push_back(best_score);
  while (static_cast<int>(mean_history_.size()) > window_) mean_history_.pop_front();
  while (static_cast<int>(best_history_.size()) > window_) best_history_.pop_front();
}

double Controller::current_slope() const {
  if (mean_history_.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> y(mean_history_.begin(), mean_history_.end());
  return ols_slope(y);
}

bool Controller::stagnant() const {
  if (!has_full_window()) return false;
  // exact equality: the best score only changes via a strictly greater child
  return best_history_.front() == best_history_.back();
}

Mode Controller::select_mode() const {
  if (!has_full_window()) return Mode::Default;
  return decide_mode(current_slope(), stagnant(), tau_slope_);
}

void Controller::restore(const std::vector<double>& means,
                         const std::vector<double>& bests) {
  mean_history_.assign(means.begin(), means.end());
  best_history_.assign(bests.begin(), bests.end());
  while (static_cast<int>(mean_history_.size()) > window_) mean_history_.pop_front();
  while (static_cast<int>(best_history_.size()) > window_) best_history_.pop_front();
}

Mode decide_mode(double slope, bool stagnant, double tau_slope) {
  if (slope < -tau_slope) return Mode::Exploit;
  if (stagnant) return Mode::Explore;
  return Mode::Default;
}

namespace {

// Uniform without replacement; short tiers fall back to with-replacement.
void sample_tier(const std::vector<PromptGenome>& tier, size_t want,
                 std::mt19937_64& rng, std::vector<PromptGenome>& out,
                 bool& fallback) {
  if (tier.empty()) throw std::logic_error("select_parents: empty tier");
  if (tier.size() >= want) {
    std::vector<size_t> idx(tier.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (size_t k = 0; k < want; ++k) {
      size_t j = k + uniform_index(rng, idx.size() - k);
      std::swap(idx[k], idx[j]);
      out.push_back(tier[idx[k]]);
    }
  } else {
    fallback = true;
    for (size_t k = 0; k < want; ++k)
      out.push_back(tier[uniform_index(rng, tier.size())]);
  }
}

}  // namespace

ParentSelection select_parents(Mode mode,
                               const std::vector<PromptGenome>& elites,
                               const std::vector<PromptGenome>& non_elites,
                               std::mt19937_64& rng) {
  if (elites.empty())
    throw std::logic_error("select_parents: elite tier is empty");
  size_t n_elite = 1, n_non = 1;
  if (mode == Mode::Exploit) n_elite = 2;
  if (mode == Mode::Explore) n_non = 2;

  ParentSelection sel;
  sample_tier(elites, n_elite, rng, sel.parents, sel.fallback_used);
  if (non_elites.empty()) {
    // substitute elites for the missing tier
    sel.fallback_used = true;
    sample_tier(elites, n_non, rng, sel.parents, sel.fallback_used);
  } else {
    sample_tier(non_elites, n_non, rng, sel.parents, sel.fallback_used);
  }
  return sel;
}

}  // namespace toxsearch
