#pragma once

#include <cstdint>
#include <iostream>
#include <optional>
#include <vector>

#include "forage/belief.hpp"
#include "forage/dirichlet.hpp"
#include "forage/env.hpp"
#include "forage/models.hpp"
#include "forage/planner.hpp"
#include "forage/rng.hpp"
#include "forage/valuation.hpp"

namespace forage {

/// Which parts of the generative model the agent starts out knowing.
struct ScenarioFlags {
  bool likelihood_known = true;
  bool transition_known = true;
};

struct AgentConfig {
  Algo algo = Algo::si;
  SearchConfig search;
  PreferenceSpec pref;
  double alpha0 = 0.25;
  ScenarioFlags scenario;
  bool warn_on_degenerate = true;
};

/// One agent: belief state, learned count tensors, history, visit counts and
/// the planning loop. Persistent counts change only through real-time
/// learning here; planning works on copies.
class Agent {
 public:
  Agent(const AgentConfig& cfg, const GridWorld* grid, std::uint64_t seed)
      : cfg_(cfg), grid_(grid), rng_(seed) {
    if (!cfg_.scenario.likelihood_known)
      a_counts_.emplace(kNumResourceObs,
                        static_cast<std::size_t>(grid_->cells()) * grid_->n_contexts,
                        cfg_.alpha0, CountRole::likelihood);
    else
      a_known_ = ResourceLikelihood::known(*grid_);
    if (!cfg_.scenario.transition_known)
      b_counts_.emplace(grid_->n_contexts, grid_->n_contexts, cfg_.alpha0,
                        CountRole::transition);
    if (cfg_.algo == Algo::ba_ucb) {
      const std::size_t n = cfg_.search.ucb_count_mode == UcbCountMode::position
                                ? static_cast<std::size_t>(grid_->cells())
                                : static_cast<std::size_t>(kNumActions);
      ucb_counts_.assign(n, 0);
    }
    reset_for_iteration(0);
  }

  /// Starts a fresh iteration: uniform context belief, delta position belief
  /// at the start cell, zero clocks, empty history. Learned counts and visit
  /// counts carry over.
  void reset_for_iteration(int start_cell) {
    belief_.position = Categorical::delta(grid_->cells(), start_cell);
    belief_.context = Categorical::uniform(grid_->n_contexts);
    clocks_ = ResourceClocks{};
    history_.clear();
    b_credit_prev_.clear();
    t_ = 0;
    last_action_ = Action::stay;
    warned_this_iteration_ = false;
  }

  /// Processes a real observation (perceive, learn, remember) and plans the
  /// next action.
  Action act(const Observation& obs) {
    const WorldModel model = world_model();

    // perceive
    BayesUpdateResult up;
    if (t_ == 0) {
      up = condition_factored(belief_, [&](std::size_t cell, std::size_t ctx) {
        return model.obs_likelihood(obs, static_cast<int>(cell),
                                    static_cast<int>(ctx));
      });
    } else {
      up = bayes_update(belief_, last_action_, obs, model);
      clocks_ = clocks_.advanced(obs.resource);
    }
    if (up.degenerate) {
      ++degenerate_events_;
      if (cfg_.warn_on_degenerate && !warned_this_iteration_) {
        std::cerr << "warning: observation had zero probability under the "
                     "predictive prior at t=" << t_
                  << "; keeping the predictive belief\n";
        warned_this_iteration_ = true;
      }
    }
    belief_ = up.belief;

    // learn (all agents update unknown models online)
    if (a_counts_) credit_likelihood(belief_, obs);
    if (b_counts_ && t_ > 0) {
      const Categorical& prev = history_.back().filtered.context;
      credit_transition_counts(prev, belief_.context, 1.0);
      b_credit_prev_.push_back(prev);
    } else {
      b_credit_prev_.push_back(Categorical::uniform(grid_->n_contexts));
    }

    // remember
    history_.push_back(StepEntry{last_action_, obs, belief_, belief_.context});

    // sophisticated learning re-credits the recent past from smoothed beliefs
    if (cfg_.algo == Algo::sl && (a_counts_ || b_counts_)) recredit_window();

    // plan
    SearchProblem problem;
    problem.grid = grid_;
    problem.likelihood = a_counts_
                             ? ResourceLikelihood::learned(&*a_counts_, grid_->n_contexts)
                             : a_known_;
    problem.transition = b_counts_ ? ContextTransition::learned(&*b_counts_)
                                   : ContextTransition::known(&grid_->context_matrix);
    problem.a_counts = a_counts_ ? &*a_counts_ : nullptr;
    problem.b_counts = b_counts_ ? &*b_counts_ : nullptr;
    problem.history = &history_;
    problem.ucb_counts = ucb_counts_.empty() ? nullptr : &ucb_counts_;
    problem.ucb_t = global_steps_ + 1;
    TreeSearch search(problem, cfg_.search, SearchVariant{cfg_.algo}, cfg_.pref);
    const Action action = plan(search, belief_, clocks_, &rng_);

    if (cfg_.algo == Algo::ba_ucb) {
      if (cfg_.search.ucb_count_mode == UcbCountMode::position)
        ++ucb_counts_[belief_.position.argmax()];
      else
        ++ucb_counts_[static_cast<int>(action)];
    }

    last_action_ = action;
    ++t_;
    ++global_steps_;
    return action;
  }

  // --- accessors ---

  const BeliefState& belief() const { return belief_; }
  const ResourceClocks& clocks() const { return clocks_; }
  const std::vector<StepEntry>& history() const { return history_; }
  const std::optional<DirichletCounts>& a_counts() const { return a_counts_; }
  const std::optional<DirichletCounts>& b_counts() const { return b_counts_; }
  const std::vector<long>& ucb_counts() const { return ucb_counts_; }
  long global_steps() const { return global_steps_; }
  std::size_t degenerate_events() const { return degenerate_events_; }
  const AgentConfig& config() const { return cfg_; }
  const GridWorld& grid() const { return *grid_; }
  Action last_action() const { return last_action_; }

  // snapshot restore hooks
  void set_counts(std::optional<DirichletCounts> a, std::optional<DirichletCounts> b) {
    a_counts_ = std::move(a);
    b_counts_ = std::move(b);
  }
  void set_ucb_counts(std::vector<long> v) { ucb_counts_ = std::move(v); }
  void set_global_steps(long t) { global_steps_ = t; }

  /// Mean KL from the true resource likelihood to the learned one, averaged
  /// over all (cell, context) conditioning cells. Zero when the likelihood is
  /// known. True columns are deterministic, so each KL is -ln p_hat(truth).
  double model_error() const {
    if (!a_counts_) return 0.0;
    double total = 0.0;
    std::size_t n = 0;
    for (int cell = 0; cell < grid_->cells(); ++cell)
      for (int ctx = 0; ctx < grid_->n_contexts; ++ctx) {
        const auto truth = static_cast<int>(grid_->resource_at(ctx, cell));
        const std::size_t col = static_cast<std::size_t>(cell) * grid_->n_contexts + ctx;
        total += -std::log(a_counts_->normalized(truth, col));
        ++n;
      }
    return total / static_cast<double>(n);
  }

  WorldModel world_model() const {
    WorldModel m;
    m.grid = grid_;
    m.likelihood = a_counts_
                       ? ResourceLikelihood::learned(&*a_counts_, grid_->n_contexts)
                       : a_known_;
    m.transition = b_counts_ ? ContextTransition::learned(&*b_counts_)
                             : ContextTransition::known(&grid_->context_matrix);
    return m;
  }

 private:
  void credit_likelihood(const BeliefState& b, const Observation& obs) {
    const int o = static_cast<int>(obs.resource);
    for (std::size_t p = 0; p < b.position.size(); ++p) {
      const double qp = b.position[p];
      if (qp == 0.0) continue;
      for (int k = 0; k < grid_->n_contexts; ++k) {
        const double w = qp * b.context[k];
        if (w != 0.0) a_counts_->add(o, p * grid_->n_contexts + k, w);
      }
    }
  }

  void credit_transition_counts(const Categorical& prev, const Categorical& cur,
                                double sign) {
    for (int j = 0; j < grid_->n_contexts; ++j) {
      const double qj = prev[j];
      if (qj == 0.0) continue;
      for (int i = 0; i < grid_->n_contexts; ++i) {
        const double w = sign * qj * cur[i];
        if (w != 0.0) b_counts_->add(i, j, w);
      }
    }
  }

  /// Moves the count mass credited to recent steps onto smoothed posteriors:
  /// each observation keeps a total credit of exactly one, re-allocated
  /// across contexts as later evidence (e.g. a hill visit) arrives.
  void recredit_window() {
    const int t = t_;  // index of the entry just appended
    const int start = std::max(0, t - cfg_.search.backwards_horizon);
    if (start >= t && !b_counts_) return;

    const WorldModel model = world_model();
    const StochasticMatrix trans = model.transition.matrix();

    // smoothed context marginals for the whole window
    std::vector<Categorical> smoothed(static_cast<std::size_t>(t - start) + 1);
    for (int tau = start; tau <= t; ++tau) {
      std::vector<SmoothingStep> steps;
      steps.reserve(static_cast<std::size_t>(t - tau));
      for (int j = tau + 1; j <= t; ++j) {
        std::vector<double> lik(grid_->n_contexts, 0.0);
        const StepEntry& e = history_[j];
        for (std::size_t p = 0; p < e.filtered.position.size(); ++p) {
          const double qp = e.filtered.position[p];
          if (qp == 0.0) continue;
          for (int k = 0; k < grid_->n_contexts; ++k)
            lik[k] += qp * model.obs_likelihood(e.obs, static_cast<int>(p), k);
        }
        steps.push_back(SmoothingStep{&trans, std::move(lik)});
      }
      smoothed[tau - start] = smooth_with_future(history_[tau].filtered.context, steps);
    }

    for (int tau = start; tau < t; ++tau) {
      const Categorical& l_new = smoothed[tau - start];
      StepEntry& e = history_[tau];
      if (a_counts_) {
        const int o = static_cast<int>(e.obs.resource);
        for (std::size_t p = 0; p < e.filtered.position.size(); ++p) {
          const double qp = e.filtered.position[p];
          if (qp == 0.0) continue;
          for (int k = 0; k < grid_->n_contexts; ++k) {
            const double delta = qp * (l_new[k] - e.credited_ctx[k]);
            if (delta != 0.0) a_counts_->add(o, p * grid_->n_contexts + k, delta);
          }
        }
      }
      if (b_counts_ && tau > 0) {
        const Categorical& prev_new =
            (tau - 1 >= start) ? smoothed[tau - 1 - start]
                               : history_[tau - 1].credited_ctx;
        // remove the old pairwise credit, then add the smoothed one
        credit_transition_counts(b_credit_prev_[tau], e.credited_ctx, -1.0);
        credit_transition_counts(prev_new, l_new, 1.0);
        b_credit_prev_[tau] = prev_new;
      }
      e.credited_ctx = l_new;
    }
  }

  AgentConfig cfg_;
  const GridWorld* grid_;
  Rng rng_;

  BeliefState belief_;
  ResourceClocks clocks_;
  std::vector<StepEntry> history_;
  std::vector<Categorical> b_credit_prev_;  // per step: prev-ctx used in B credit
  std::optional<DirichletCounts> a_counts_;
  std::optional<DirichletCounts> b_counts_;
  ResourceLikelihood a_known_;
  std::vector<long> ucb_counts_;
  Action last_action_ = Action::stay;
  int t_ = 0;
  long global_steps_ = 0;
  std::size_t degenerate_events_ = 0;
  bool warned_this_iteration_ = false;
};

}  // namespace forage
