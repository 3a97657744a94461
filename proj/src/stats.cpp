#include "toxsearch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "toxsearch/rng.hpp"

namespace toxsearch {

std::vector<double> midranks(std::span<const double> values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

namespace {

double tie_sum(std::span<const double> pooled) {
  std::map<double, size_t> counts;
  for (double v : pooled) ++counts[v];
  double s = 0.0;
  for (auto& [_, t] : counts) {
    double td = static_cast<double>(t);
    s += td * td * td - td;
  }
  return s;
}

double normal_sf(double z) {
  static const boost::math::normal dist(0.0, 1.0);
  return boost::math::cdf(boost::math::complement(dist, z));
}

}  // namespace

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2)
    throw std::invalid_argument("kruskal_wallis: need at least 2 groups");
  for (const auto& g : groups) {
    if (g.empty())
      throw std::invalid_argument("kruskal_wallis: empty group");
  }
  std::vector<double> pooled;
  for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
  const double n = static_cast<double>(pooled.size());

  auto ranks = midranks(pooled);
  double h = 0.0;
  size_t offset = 0;
  for (const auto& g : groups) {
    double rank_sum = 0.0;
    for (size_t i = 0; i < g.size(); ++i) rank_sum += ranks[offset + i];
    offset += g.size();
    h += rank_sum * rank_sum / static_cast<double>(g.size());
  }
  h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

  const double correction = 1.0 - tie_sum(pooled) / (n * n * n - n);
  TestResult result;
  if (correction <= 0.0) {
    // all values identical
    result.statistic = 0.0;
    result.p_value = 1.0;
    return result;
  }
  h /= correction;
  result.statistic = h;
  boost::math::chi_squared chi(static_cast<double>(groups.size()) - 1.0);
  result.p_value = boost::math::cdf(boost::math::complement(chi, std::max(0.0, h)));
  return result;
}

namespace {

double u_statistic(std::span<const double> a, std::span<const double> b) {
  double u = 0.0;
  for (double x : a) {
    for (double y : b) {
      if (x > y)
        u += 1.0;
      else if (x == y)
        u += 0.5;
    }
  }
  return u;
}

// Recursively enumerates the exact U distribution over all assignments of
// the pooled values to group a. Counts are P(U <= u) and P(U >= u).
void enumerate_u(const std::vector<double>& pooled, size_t idx, size_t remaining,
                 std::vector<double>& chosen, double observed, long long& le,
                 long long& ge, long long& total,
                 std::vector<double>& complement, size_t n_a) {
  if (chosen.size() == n_a) {
    // everything not chosen — both the skipped prefix and the untouched
    // suffix — forms group b
    const size_t prefix = complement.size();
    for (size_t k = idx; k < pooled.size(); ++k) complement.push_back(pooled[k]);
    double u = 0.0;
    for (double x : chosen)
      for (double y : complement) {
        if (x > y) u += 1.0;
        else if (x == y) u += 0.5;
      }
    complement.resize(prefix);
    ++total;
    if (u <= observed + 1e-12) ++le;
    if (u >= observed - 1e-12) ++ge;
    return;
  }
  if (pooled.size() - idx < remaining) return;
  if (idx >= pooled.size()) return;
  chosen.push_back(pooled[idx]);
  enumerate_u(pooled, idx + 1, remaining - 1, chosen, observed, le, ge, total,
              complement, n_a);
  chosen.pop_back();
  complement.push_back(pooled[idx]);
  enumerate_u(pooled, idx + 1, remaining, chosen, observed, le, ge, total,
              complement, n_a);
  complement.pop_back();
}

}  // namespace

double mann_whitney_exact_p(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const double observed = u_statistic(a, b);
  long long le = 0, ge = 0, total = 0;
  std::vector<double> chosen, complement;
  chosen.reserve(a.size());
  complement.reserve(pooled.size());
  enumerate_u(pooled, 0, a.size(), chosen, observed, le, ge, total, complement,
              a.size());
  const double p = 2.0 * std::min(static_cast<double>(le), static_cast<double>(ge)) /
                   static_cast<double>(total);
  return std::min(1.0, p);
}

namespace {

// Tie- and continuity-corrected z for U; 0 when the variance vanishes.
double mann_whitney_z(std::span<const double> a, std::span<const double> b) {
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  const double u = u_statistic(a, b);
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const double tie_term = tie_sum(pooled) / (n * (n - 1.0));
  const double sigma2 = n1 * n2 / 12.0 * (n + 1.0 - tie_term);
  if (sigma2 <= 0.0) return 0.0;
  double num = u - n1 * n2 / 2.0;
  // continuity correction toward the mean
  if (num > 0.5) num -= 0.5;
  else if (num < -0.5) num += 0.5;
  else num = 0.0;
  return num / std::sqrt(sigma2);
}

}  // namespace

namespace {

bool has_ties(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());
  return std::adjacent_find(pooled.begin(), pooled.end()) != pooled.end();
}

// Null distribution of U for tie-free samples via the rank-count
// recurrence f(n1, n2, u) = f(n1-1, n2, u-n2) + f(n1, n2-1, u).
std::vector<double> u_null_counts(size_t n1, size_t n2) {
  std::vector<std::vector<double>> f(n2 + 1,
                                     std::vector<double>(n1 * n2 + 1, 0.0));
  for (size_t j = 0; j <= n2; ++j) f[j][0] = 1.0;
  for (size_t i = 1; i <= n1; ++i) {
    for (size_t j = 1; j <= n2; ++j) {
      // descending u keeps f[j][u - j] at the previous value of i
      for (size_t u = n1 * n2 + 1; u-- > 0;)
        f[j][u] = (u >= j ? f[j][u - j] : 0.0) + f[j - 1][u];
    }
    // row j=0 stays f(i, 0, u) = [u == 0], already correct
  }
  return f[n2];
}

}  // namespace

double mann_whitney_approx_p(std::span<const double> a, std::span<const double> b) {
  const size_t n = a.size() + b.size();
  // The normal curve is too coarse below ~20 observations, where the null
  // distribution of U only takes a handful of values; use the rank-count
  // recurrence there instead (tie-free only — midranks break the recurrence).
  if (n >= 2 && n <= 20 && !a.empty() && !b.empty() && !has_ties(a, b)) {
    const double u = u_statistic(a, b);
    auto counts = u_null_counts(a.size(), b.size());
    double total = 0.0, le = 0.0, ge = 0.0;
    for (size_t k = 0; k < counts.size(); ++k) {
      total += counts[k];
      if (static_cast<double>(k) <= u + 1e-9) le += counts[k];
      if (static_cast<double>(k) >= u - 1e-9) ge += counts[k];
    }
    return std::min(1.0, 2.0 * std::min(le, ge) / total);
  }
  const double z = mann_whitney_z(a, b);
  return std::min(1.0, 2.0 * normal_sf(std::fabs(z)));
}

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("mann_whitney_u: empty sample");
  TestResult result;
  result.statistic = u_statistic(a, b);
  result.z = mann_whitney_z(a, b);
  result.effect_size_r =
      std::fabs(result.z) / std::sqrt(static_cast<double>(a.size() + b.size()));
  result.p_value = (a.size() + b.size() <= 12)
                       ? mann_whitney_exact_p(a, b)
                       : std::min(1.0, 2.0 * normal_sf(std::fabs(result.z)));
  return result;
}

double bonferroni_alpha(double base_alpha, int n_tests) {
  if (n_tests < 1)
    throw std::invalid_argument("bonferroni_alpha: n_tests must be >= 1");
  return base_alpha / static_cast<double>(n_tests);
}

std::pair<double, double> bootstrap_ci(
    std::span<const double> samples,
    const std::function<double(std::span<const double>)>& statistic,
    int iterations, double level, std::mt19937_64& rng) {
  if (samples.size() < 2)
    throw std::invalid_argument("bootstrap_ci: need at least 2 samples");
  std::vector<double> stats;
  stats.reserve(iterations);
  std::vector<double> resample(samples.size());
  for (int it = 0; it < iterations; ++it) {
    for (size_t i = 0; i < samples.size(); ++i)
      resample[i] = samples[uniform_index(rng, samples.size())];
    stats.push_back(statistic(resample));
  }
  std::sort(stats.begin(), stats.end());
  const double tail = (1.0 - level) / 2.0;
  auto quantile = [&](double q) {
    double pos = q * static_cast<double>(stats.size() - 1);
    size_t lo = static_cast<size_t>(pos);
    size_t hi = std::min(lo + 1, stats.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return stats[lo] * (1.0 - frac) + stats[hi] * frac;
  };
  return {quantile(tail), quantile(1.0 - tail)};
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  size_t n = values.size();
  return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

double stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double s = 0.0;
  for (double v : values) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(values.size()));
}

}  // namespace toxsearch
