#pragma once

#include <stdexcept>
#include <vector>

#include "forage/belief.hpp"
#include "forage/dirichlet.hpp"
#include "forage/env.hpp"

namespace forage {

/// View over the resource-observation likelihood p(resource | cell, context).
/// Either a fixed table (model known) or a live Dirichlet-mean read of a
/// count tensor (model being learned). Conditioning cells are indexed
/// cell * n_contexts + context.
class ResourceLikelihood {
 public:
  ResourceLikelihood() = default;

  static ResourceLikelihood known(const GridWorld& g) {
    ResourceLikelihood m;
    m.n_contexts_ = g.n_contexts;
    m.table_ = ProbTable(kNumResourceObs, g.cells() * g.n_contexts);
    for (int ctx = 0; ctx < g.n_contexts; ++ctx)
      for (int cell = 0; cell < g.cells(); ++cell) {
        const auto obs = static_cast<std::size_t>(g.resource_at(ctx, cell));
        m.table_.at(obs, static_cast<std::size_t>(cell) * g.n_contexts + ctx) = 1.0;
      }
    return m;
  }

  static ResourceLikelihood learned(const DirichletCounts* counts, int n_contexts) {
    if (counts == nullptr || counts->outcomes() != kNumResourceObs)
      throw std::invalid_argument("ResourceLikelihood: bad counts");
    ResourceLikelihood m;
    m.counts_ = counts;
    m.n_contexts_ = n_contexts;
    return m;
  }

  bool is_learned() const { return counts_ != nullptr; }
  int n_contexts() const { return n_contexts_; }

  double p(int obs, int cell, int ctx) const {
    const std::size_t col = static_cast<std::size_t>(cell) * n_contexts_ + ctx;
    if (counts_) return counts_->normalized(obs, col);
    return table_.at(obs, col);
  }

 private:
  const DirichletCounts* counts_ = nullptr;
  ProbTable table_;
  int n_contexts_ = 0;
};

/// View over the context transition model, known matrix or learned counts.
class ContextTransition {
 public:
  ContextTransition() = default;

  static ContextTransition known(const StochasticMatrix* m) {
    ContextTransition t;
    t.matrix_ = m;
    return t;
  }

  static ContextTransition learned(const DirichletCounts* counts) {
    if (counts == nullptr || counts->outcomes() != counts->cells())
      throw std::invalid_argument("ContextTransition: counts must be square");
    ContextTransition t;
    t.counts_ = counts;
    return t;
  }

  bool is_learned() const { return counts_ != nullptr; }

  std::size_t n() const { return counts_ ? counts_->outcomes() : matrix_->n; }

  double p(int next, int prev) const {
    if (counts_) return counts_->normalized(next, prev);
    return matrix_->at(next, prev);
  }

  /// Materializes the current transition matrix (Dirichlet mean if learned).
  StochasticMatrix matrix() const {
    const std::size_t k = n();
    StochasticMatrix m;
    m.n = k;
    m.m.resize(k * k);
    for (std::size_t prev = 0; prev < k; ++prev)
      for (std::size_t next = 0; next < k; ++next)
        m.m[next * k + prev] = p(static_cast<int>(next), static_cast<int>(prev));
    return m;
  }

  Categorical predictive(const Categorical& prior) const {
    const std::size_t k = n();
    if (prior.size() != k)
      throw std::invalid_argument("ContextTransition: prior size mismatch");
    std::vector<double> out(k, 0.0);
    for (std::size_t prev = 0; prev < k; ++prev) {
      const double q = prior[prev];
      if (q == 0.0) continue;
      for (std::size_t next = 0; next < k; ++next)
        out[next] += p(static_cast<int>(next), static_cast<int>(prev)) * q;
    }
    return Categorical::from_weights(std::move(out));
  }

 private:
  const StochasticMatrix* matrix_ = nullptr;
  const DirichletCounts* counts_ = nullptr;
};

/// The models a belief update sees: the grid fixes position dynamics and the
/// hill's context-observation structure; resource likelihood and context
/// transition may be learned.
struct WorldModel {
  const GridWorld* grid = nullptr;
  ResourceLikelihood likelihood;
  ContextTransition transition;

  /// p(observation | position cell, context) across both modalities. The
  /// context modality is structural: the hill reveals the context exactly,
  /// everywhere else emits no-context.
  double obs_likelihood(const Observation& o, int cell, int ctx) const {
    const int revealed = (cell == grid->hill) ? ctx : grid->n_contexts;
    if (o.context_obs != revealed) return 0.0;
    return likelihood.p(static_cast<int>(o.resource), cell, ctx);
  }
};

/// Predictive belief after an action: deterministic position push-forward and
/// one context-chain step.
inline BeliefState predict_belief(const BeliefState& b, Action action,
                                  const WorldModel& m) {
  std::vector<double> pos(b.position.size(), 0.0);
  for (std::size_t cell = 0; cell < b.position.size(); ++cell) {
    const double q = b.position[cell];
    if (q == 0.0) continue;
    pos[position_transition(static_cast<int>(cell), action, *m.grid)] += q;
  }
  return BeliefState{Categorical(std::move(pos)), m.transition.predictive(b.context)};
}

/// Full Bayes step: predictive prior, then exact conditioning on both
/// observation modalities, re-factored by marginalization.
inline BayesUpdateResult bayes_update(const BeliefState& prior, Action action,
                                      const Observation& obs, const WorldModel& m) {
  const BeliefState pred = predict_belief(prior, action, m);
  return condition_factored(pred, [&](std::size_t cell, std::size_t ctx) {
    return m.obs_likelihood(obs, static_cast<int>(cell), static_cast<int>(ctx));
  });
}

/// One real (or simulated) time-step as the smoothing machinery sees it.
struct StepEntry {
  Action action_into = Action::stay;  // action that produced this observation
  Observation obs;
  BeliefState filtered;     // posterior computed online at this step
  Categorical credited_ctx; // context allocation currently credited to counts
};

}  // namespace forage
