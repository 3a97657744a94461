#pragma once

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace toxsearch {

struct TestResult {
  double statistic = 0.0;  // H (Kruskal-Wallis) or U (Mann-Whitney)
  double p_value = 1.0;
  double z = 0.0;
  double effect_size_r = 0.0;  // |Z| / sqrt(n), Mann-Whitney only
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  bool significant = false;
};

// Midranks over the pooled sample; ties get the average rank.
std::vector<double> midranks(std::span<const double> values);

// Kruskal-Wallis H with tie correction; p via the chi-square
// approximation with k-1 degrees of freedom. All-identical data gives
// H = 0, p = 1.
TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

// Two-sided Mann-Whitney U (U counts a-over-b wins, ties at 1/2).
// Normal approximation with tie correction and continuity correction;
// exact enumeration when n_a + n_b <= 12. Cohen's r = |Z| / sqrt(n).
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// Exact-enumeration two-sided p, for oracle testing against the
// approximation path.
double mann_whitney_exact_p(std::span<const double> a, std::span<const double> b);

// Normal-approximation two-sided p (tie + continuity corrected),
// regardless of sample size.
double mann_whitney_approx_p(std::span<const double> a, std::span<const double> b);

double bonferroni_alpha(double base_alpha, int n_tests);

// Percentile bootstrap interval of `statistic` over `iterations`
// resamples with replacement at the original size.
std::pair<double, double> bootstrap_ci(
    std::span<const double> samples,
    const std::function<double(std::span<const double>)>& statistic,
    int iterations, double level, std::mt19937_64& rng);

double mean(std::span<const double> values);
double median(std::vector<double> values);
double stddev(std::span<const double> values);  // population std

}  // namespace toxsearch
