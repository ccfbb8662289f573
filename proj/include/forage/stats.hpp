#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "forage/csvio.hpp"
#include "forage/mathutil.hpp"
#include "forage/rng.hpp"

namespace forage {

struct AnovaResult {
  double f = 0.0;
  double p = 1.0;
  int df_between = 0;
  int df_within = 0;
  bool degenerate = false;  // zero within-group variance
};

/// Classic one-way ANOVA: between/within mean-square ratio and the right-tail
/// p from the F distribution.
inline AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2)
    throw std::invalid_argument("one_way_anova: need at least 2 groups");
  std::size_t n_total = 0;
  double grand = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2)
      throw std::invalid_argument("one_way_anova: each group needs >= 2 samples");
    n_total += g.size();
    for (double x : g) grand += x;
  }
  grand /= static_cast<double>(n_total);

  double ss_between = 0.0, ss_within = 0.0;
  for (const auto& g : groups) {
    double mean = 0.0;
    for (double x : g) mean += x;
    mean /= static_cast<double>(g.size());
    ss_between += static_cast<double>(g.size()) * (mean - grand) * (mean - grand);
    for (double x : g) ss_within += (x - mean) * (x - mean);
  }
  AnovaResult r;
  r.df_between = static_cast<int>(groups.size()) - 1;
  r.df_within = static_cast<int>(n_total - groups.size());
  const double ms_between = ss_between / r.df_between;
  const double ms_within = ss_within / r.df_within;
  if (ms_within == 0.0) {
    r.degenerate = true;
    if (ms_between == 0.0) {
      r.f = 0.0;
      r.p = 1.0;
    } else {
      r.f = std::numeric_limits<double>::infinity();
      r.p = 0.0;
    }
    return r;
  }
  r.f = ms_between / ms_within;
  r.p = f_tail_p(r.f, r.df_between, r.df_within);
  return r;
}

struct Contrast {
  std::string a;
  std::string b;
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double p = 1.0;
};

/// Percentile-bootstrap difference of means between two samples.
inline Contrast bootstrap_mean_diff(const std::string& name_a,
                                    const std::vector<double>& xa,
                                    const std::string& name_b,
                                    const std::vector<double>& xb,
                                    int resamples, std::uint64_t seed) {
  if (xa.empty() || xb.empty())
    throw std::invalid_argument("bootstrap_mean_diff: empty sample");
  auto mean = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / static_cast<double>(v.size());
  };
  Contrast c;
  c.a = name_a;
  c.b = name_b;
  c.estimate = mean(xa) - mean(xb);

  Rng rng(seed);
  std::vector<double> diffs(resamples);
  for (int r = 0; r < resamples; ++r) {
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < xa.size(); ++i)
      sa += xa[rng.uniform_index(xa.size())];
    for (std::size_t i = 0; i < xb.size(); ++i)
      sb += xb[rng.uniform_index(xb.size())];
    diffs[r] = sa / static_cast<double>(xa.size()) -
               sb / static_cast<double>(xb.size());
  }
  std::sort(diffs.begin(), diffs.end());
  auto pct = [&](double q) {
    const double idx = q * (resamples - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min<std::size_t>(lo + 1, resamples - 1);
    const double frac = idx - static_cast<double>(lo);
    return diffs[lo] * (1.0 - frac) + diffs[hi] * frac;
  };
  c.ci_lo = pct(0.025);
  c.ci_hi = pct(0.975);
  std::size_t below = 0, above = 0;
  for (double d : diffs) {
    if (d < 0.0) ++below;
    if (d > 0.0) ++above;
  }
  const double tail =
      static_cast<double>(std::min(below, above) + 1) / (resamples + 1);
  c.p = std::min(1.0, 2.0 * tail);
  return c;
}

/// All pairwise contrasts of per-record survival within an iteration window
/// [first, last], in the order the algorithms appear in `order`.
inline std::vector<Contrast> bootstrap_contrasts(
    const std::vector<TrialRecord>& records, int first_iteration,
    int last_iteration, int resamples = 10000, std::uint64_t seed = 7) {
  if (first_iteration > last_iteration)
    throw std::invalid_argument("bootstrap_contrasts: empty window");
  std::map<std::string, std::vector<double>> groups;
  std::vector<std::string> order;
  for (const auto& r : records) {
    if (r.iteration < first_iteration || r.iteration > last_iteration) continue;
    const std::string name = to_string(r.algorithm);
    if (groups.find(name) == groups.end()) order.push_back(name);
    groups[name].push_back(static_cast<double>(r.steps_survived));
  }
  if (groups.size() < 2)
    throw std::invalid_argument("bootstrap_contrasts: need >= 2 algorithms");
  std::vector<Contrast> out;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j)
      out.push_back(bootstrap_mean_diff(
          order[i], groups[order[i]], order[j], groups[order[j]], resamples,
          derive_seed(seed, {i, j})));
  return out;
}

struct SeriesPoint {
  double mean = 0.0;
  double sd = 0.0;
  int n = 0;
};

/// Per-algorithm, per-iteration mean survival (the learning curve).
inline std::map<std::string, std::vector<SeriesPoint>> learning_curves(
    const std::vector<TrialRecord>& records) {
  std::map<std::string, std::vector<SeriesPoint>> sums;
  std::map<std::string, std::vector<std::vector<double>>> raw;
  for (const auto& r : records) {
    auto& v = raw[to_string(r.algorithm)];
    if (static_cast<int>(v.size()) <= r.iteration) v.resize(r.iteration + 1);
    v[r.iteration].push_back(static_cast<double>(r.steps_survived));
  }
  for (auto& [name, per_iter] : raw) {
    std::vector<SeriesPoint> series(per_iter.size());
    for (std::size_t i = 0; i < per_iter.size(); ++i) {
      const auto& xs = per_iter[i];
      SeriesPoint pt;
      pt.n = static_cast<int>(xs.size());
      if (pt.n > 0) {
        for (double x : xs) pt.mean += x;
        pt.mean /= pt.n;
        if (pt.n > 1) {
          for (double x : xs) pt.sd += (x - pt.mean) * (x - pt.mean);
          pt.sd = std::sqrt(pt.sd / (pt.n - 1));
        }
      }
      series[i] = pt;
    }
    sums[name] = std::move(series);
  }
  return sums;
}

/// Windowed per-algorithm mean survival.
inline std::map<std::string, double> window_means(
    const std::vector<TrialRecord>& records, int first_iteration,
    int last_iteration) {
  std::map<std::string, double> sum;
  std::map<std::string, int> n;
  for (const auto& r : records) {
    if (r.iteration < first_iteration || r.iteration > last_iteration) continue;
    sum[to_string(r.algorithm)] += r.steps_survived;
    n[to_string(r.algorithm)] += 1;
  }
  for (auto& [name, s] : sum) s /= n[name];
  return sum;
}

}  // namespace forage
