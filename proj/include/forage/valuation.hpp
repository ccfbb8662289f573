#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "forage/categorical.hpp"
#include "forage/dirichlet.hpp"
#include "forage/env.hpp"
#include "forage/mathutil.hpp"

namespace forage {

/// Parameters of the dynamic multi-objective preference function.
struct PreferenceSpec {
  double empty_reward = -1.0;
  double penalty = -100.0;
  std::array<int, kNumResources> limits = {20, 22, 25};
  double c = 0.1;  // preference precision (inverse temperature)
};

/// Raw reward vector over {empty, food, water, sleep}. Each resource is worth
/// its clock value; once any clock reaches its limit the empty outcome and
/// every at-or-over-limit resource collapse to the penalty.
inline std::array<double, kNumResourceObs> preferences(const ResourceClocks& clocks,
                                                       const PreferenceSpec& spec) {
  std::array<double, kNumResourceObs> r;
  r[0] = spec.empty_reward;
  bool over = false;
  for (int i = 0; i < kNumResources; ++i) {
    r[i + 1] = static_cast<double>(clocks[i]);
    if (clocks[i] >= spec.limits[i]) over = true;
  }
  if (over) {
    r[0] = spec.penalty;
    for (int i = 0; i < kNumResources; ++i)
      if (clocks[i] >= spec.limits[i]) r[i + 1] = spec.penalty;
  }
  return r;
}

/// Log-probability preference vector: log-softmax of c * raw.
inline std::array<double, kNumResourceObs> to_log_preference(
    const std::array<double, kNumResourceObs>& raw, double c) {
  std::array<double, kNumResourceObs> scaled;
  for (std::size_t i = 0; i < raw.size(); ++i) scaled[i] = c * raw[i];
  std::array<double, kNumResourceObs> out;
  log_softmax(std::span<const double>(scaled), std::span<double>(out));
  return out;
}

inline std::vector<double> to_log_preference(std::span<const double> raw, double c) {
  std::vector<double> scaled(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) scaled[i] = c * raw[i];
  return log_softmax(scaled);
}

/// Expected log preference of the predicted observations.
inline double pragmatic_value(std::span<const double> predicted_obs,
                              std::span<const double> log_pref) {
  if (predicted_obs.size() != log_pref.size())
    throw std::invalid_argument("pragmatic_value: size mismatch");
  double v = 0.0;
  for (std::size_t o = 0; o < predicted_obs.size(); ++o)
    if (predicted_obs[o] > 0.0) v += predicted_obs[o] * log_pref[o];
  return v;
}

/// Expected posterior-vs-prior divergence over states, i.e. the mutual
/// information between states and observations under the predictive joint
/// q(s) * p(o|s). `likelihood` is column-stochastic over outcomes per state.
inline double epistemic_value(const Categorical& prior_states,
                              const ProbTable& likelihood) {
  if (likelihood.cells != prior_states.size())
    throw std::invalid_argument("epistemic_value: shape mismatch");
  const std::size_t n_obs = likelihood.outcomes;
  std::vector<double> q_obs(n_obs, 0.0);
  for (std::size_t s = 0; s < prior_states.size(); ++s) {
    const double qs = prior_states[s];
    if (qs == 0.0) continue;
    for (std::size_t o = 0; o < n_obs; ++o) q_obs[o] += qs * likelihood.at(o, s);
  }
  double mi = 0.0;
  for (std::size_t s = 0; s < prior_states.size(); ++s) {
    const double qs = prior_states[s];
    if (qs == 0.0) continue;
    for (std::size_t o = 0; o < n_obs; ++o) {
      const double pos = likelihood.at(o, s);
      if (pos > 0.0 && q_obs[o] > 0.0) mi += qs * pos * std::log(pos / q_obs[o]);
    }
  }
  return mi;
}

/// Expected Dirichlet divergence from the hypothetical count update: for each
/// outcome o (weighted by predicted_obs) the counts gain `belief` soft counts
/// in row o; the value is the expected KL from updated to current counts.
/// Vanishes as counts grow.
inline double novelty_value(const DirichletCounts& counts,
                            const Categorical& node_belief,
                            std::span<const double> predicted_obs) {
  if (node_belief.size() != counts.cells())
    throw std::invalid_argument("novelty_value: belief size mismatch");
  if (predicted_obs.size() != counts.outcomes())
    throw std::invalid_argument("novelty_value: observation size mismatch");
  double total = 0.0;
  std::vector<double> after(counts.outcomes());
  for (std::size_t o = 0; o < predicted_obs.size(); ++o) {
    const double qo = predicted_obs[o];
    if (qo <= 0.0) continue;
    double kl_sum = 0.0;
    for (std::size_t cell = 0; cell < counts.cells(); ++cell) {
      const double w = node_belief[cell];
      if (w == 0.0) continue;
      const auto col = counts.column(cell);
      for (std::size_t i = 0; i < after.size(); ++i) after[i] = col[i];
      after[o] += w;
      kl_sum += dirichlet_kl(after, col);
    }
    total += qo * kl_sum;
  }
  return total;
}

/// Total Dirichlet divergence between two count tensors of the same shape
/// (sum of per-column KLs). Used for the aggregate information gain of a
/// smoothing window.
inline double dirichlet_kl_total(const DirichletCounts& after,
                                 const DirichletCounts& before) {
  if (after.outcomes() != before.outcomes() || after.cells() != before.cells())
    throw std::invalid_argument("dirichlet_kl_total: shape mismatch");
  double total = 0.0;
  for (std::size_t cell = 0; cell < after.cells(); ++cell)
    total += dirichlet_kl(after.column(cell), before.column(cell));
  return total;
}

/// Visit-count exploration bonus: c * sqrt(ln t / max(visits, 1)).
inline double ucb_bonus(long visits, long t, double c_ucb) {
  if (t < 1) throw std::invalid_argument("ucb_bonus: t must be >= 1");
  const double n = static_cast<double>(visits < 1 ? 1 : visits);
  return c_ucb * std::sqrt(std::log(static_cast<double>(t)) / n);
}

/// Per-action value decomposition in nats. Lower total is better; epistemic
/// and novelty are nonnegative.
struct EfeBreakdown {
  double epistemic = 0.0;
  double novelty = 0.0;
  double pragmatic = 0.0;

  double total() const { return -epistemic - novelty - pragmatic; }
};

}  // namespace forage
