#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "forage/belief.hpp"
#include "forage/dirichlet.hpp"
#include "forage/env.hpp"
#include "forage/mathutil.hpp"
#include "forage/models.hpp"
#include "forage/rng.hpp"
#include "forage/valuation.hpp"

namespace forage {

enum class Algo { si = 0, sl, ba, ba_ucb };

inline const char* to_string(Algo a) {
  switch (a) {
    case Algo::si: return "SI";
    case Algo::sl: return "SL";
    case Algo::ba: return "BA";
    case Algo::ba_ucb: return "BA+UCB";
  }
  return "?";
}

inline Algo parse_algo(const std::string& s) {
  if (s == "SI" || s == "si") return Algo::si;
  if (s == "SL" || s == "sl") return Algo::sl;
  if (s == "BA" || s == "ba") return Algo::ba;
  if (s == "BA+UCB" || s == "ba+ucb" || s == "ba_ucb") return Algo::ba_ucb;
  throw std::invalid_argument("unknown algorithm: " + s);
}

/// Which objective the recursive search optimizes and which in-tree hooks run.
struct SearchVariant {
  Algo algo = Algo::si;

  bool uses_epistemic() const { return algo == Algo::si || algo == Algo::sl; }
  bool uses_novelty() const { return algo == Algo::sl; }
  bool reward_based() const { return algo == Algo::ba || algo == Algo::ba_ucb; }
  bool uses_ucb() const { return algo == Algo::ba_ucb; }
  bool learn_in_tree() const { return algo != Algo::si; }
  bool smooth_in_tree() const { return algo == Algo::sl; }
};

enum class ObsExpansion { enumerate_above_threshold, sample_one };
enum class UcbCountMode { position, action };

struct SearchConfig {
  int horizon = 4;
  double state_prune_threshold = 0.16;
  double action_prune_margin = 3.0;
  double softmax_temperature = 1.0;
  ObsExpansion observation_expansion = ObsExpansion::enumerate_above_threshold;
  int backwards_horizon = 3;  // smoothing window (SL)
  bool memoization = true;
  int belief_quantization = 4;  // decimal places for memo keys
  UcbCountMode ucb_count_mode = UcbCountMode::position;
  double c_ucb = 2.0;
  bool check_memo_consistency = false;  // test mode: recompute hits and compare
  std::ostream* trace = nullptr;
};

/// Keeps every action whose value is within `margin` of the best; the best
/// action always survives.
inline std::vector<int> viable_actions(std::span<const double> values,
                                       double margin) {
  double best = values[0];
  for (double v : values) best = v > best ? v : best;
  std::vector<int> keep;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] >= best - margin) keep.push_back(static_cast<int>(i));
  return keep;
}

/// States with probability at or above the threshold; falls back to the
/// single most probable state when none qualify.
inline std::vector<int> likely_states(const Categorical& belief, double threshold) {
  std::vector<int> keep;
  for (std::size_t i = 0; i < belief.size(); ++i)
    if (belief[i] > 0.0 && belief[i] >= threshold)
      keep.push_back(static_cast<int>(i));
  if (keep.empty()) keep.push_back(static_cast<int>(belief.argmax()));
  return keep;
}

struct NodeResult {
  std::array<double, kNumActions> values{};
  BeliefState posterior;
};

/// Subtree cache keyed by (depth, quantized beliefs, clocks, pending
/// observation). For variants that learn inside the tree the cached value
/// ignores in-tree count drift between paths; with learning hooks inactive a
/// hit is exact.
class MemoTable {
 public:
  struct Stats {
    std::size_t hits = 0;
    std::size_t misses = 0;
  };

  NodeResult* find(const std::string& key) {
    auto it = map_.find(key);
    if (it == map_.end()) {
      ++stats_.misses;
      return nullptr;
    }
    ++stats_.hits;
    return &it->second;
  }

  void insert(std::string key, NodeResult value) {
    map_.emplace(std::move(key), std::move(value));
  }

  void clear() {
    map_.clear();
    stats_ = Stats{};
  }

  std::size_t size() const { return map_.size(); }
  const Stats& stats() const { return stats_; }

 private:
  std::unordered_map<std::string, NodeResult> map_;
  Stats stats_;
};

/// Everything a single search reads. The persistent count tensors are never
/// written: the search copies what it needs.
struct SearchProblem {
  const GridWorld* grid = nullptr;
  ResourceLikelihood likelihood;     // bound to persistent counts or known table
  ContextTransition transition;
  const DirichletCounts* a_counts = nullptr;  // persistent, when learned
  const DirichletCounts* b_counts = nullptr;  // persistent, when learned
  const std::vector<StepEntry>* history = nullptr;  // last entry = current step
  const std::vector<long>* ucb_counts = nullptr;    // BA+UCB only
  long ucb_t = 1;  // cumulative real steps, for the ln(t) term
};

/// Recursive belief-tree search over counterfactual action/observation
/// trajectories, Bellman-form: each node contributes its objective once and
/// adds the softmax-weighted expectation of its children.
class TreeSearch {
 public:
  TreeSearch(const SearchProblem& problem, const SearchConfig& cfg,
             const SearchVariant& variant, const PreferenceSpec& pref)
      : base_(problem), cfg_(cfg), variant_(variant), pref_(pref) {
    if (base_.grid == nullptr || base_.history == nullptr ||
        base_.history->empty())
      throw std::invalid_argument("TreeSearch: missing grid or history");
    n_ctx_ = base_.grid->n_contexts;
    n_ctx_obs_ = n_ctx_ + 1;
    quant_scale_ = 1.0;
    for (int i = 0; i < cfg_.belief_quantization; ++i) quant_scale_ *= 10.0;

    // In-tree learning works on local copies; the persistent tensors stay
    // untouched by construction.
    learn_a_ = variant_.learn_in_tree() && base_.likelihood.is_learned();
    learn_b_ = variant_.learn_in_tree() && base_.transition.is_learned();
    model_.grid = base_.grid;
    if (learn_a_) {
      a_local_ = *base_.a_counts;
      model_.likelihood = ResourceLikelihood::learned(&a_local_, n_ctx_);
    } else {
      model_.likelihood = base_.likelihood;
    }
    if (learn_b_) {
      b_local_ = *base_.b_counts;
      model_.transition = ContextTransition::learned(&b_local_);
    } else {
      model_.transition = base_.transition;
    }
    if (variant_.uses_ucb()) {
      if (base_.ucb_counts == nullptr)
        throw std::invalid_argument("TreeSearch: BA+UCB requires visit counts");
      ucb_local_ = *base_.ucb_counts;
    }
  }

  struct RootResult {
    std::array<double, kNumActions> values{};
    BeliefState posterior;
    std::size_t calls = 0;
    MemoTable::Stats memo;
  };

  RootResult run(const BeliefState& belief, const ResourceClocks& clocks,
                 Rng* rng) {
    rng_ = rng;
    true_t_ = static_cast<int>(base_.history->size()) - 1;
    sim_.clear();
    memo_.clear();
    calls_ = 0;
    const NodeResult root = search_node(belief, clocks,
                                        base_.history->back().obs,
                                        Action::stay, 0);
    RootResult r;
    r.values = root.values;
    r.posterior = root.posterior;
    r.calls = calls_;
    r.memo = memo_.stats();
    return r;
  }

  std::size_t calls() const { return calls_; }
  const MemoTable& memo() const { return memo_; }

 private:
  struct CountUndo {
    bool is_b;
    std::uint32_t outcome;
    std::uint32_t cell;
    double old_value;
  };

  const StepEntry& entry(int t) const {
    const int real = static_cast<int>(base_.history->size());
    if (t < real) return (*base_.history)[t];
    return sim_[t - real];
  }

  // --- in-tree count bookkeeping (path-local, rolled back at node exit) ---

  void add_a(int outcome, std::size_t cell, double w) {
    undo_.push_back({false, static_cast<std::uint32_t>(outcome),
                     static_cast<std::uint32_t>(cell), a_local_.at(outcome, cell)});
    a_local_.add(outcome, cell, w);
  }

  void add_b(int next, int prev, double w) {
    undo_.push_back({true, static_cast<std::uint32_t>(next),
                     static_cast<std::uint32_t>(prev), b_local_.at(next, prev)});
    b_local_.add(next, prev, w);
  }

  void rollback(std::size_t mark) {
    while (undo_.size() > mark) {
      const CountUndo& u = undo_.back();
      if (u.is_b)
        b_local_.set(u.outcome, u.cell, u.old_value);
      else
        a_local_.set(u.outcome, u.cell, u.old_value);
      undo_.pop_back();
    }
  }

  // Soft count credit of one (belief, observation) pair into the local
  // tensors, via the joint factored belief.
  void credit_joint(const BeliefState& b, const Observation& obs) {
    if (!learn_a_) return;
    const int o = static_cast<int>(obs.resource);
    for (std::size_t p = 0; p < b.position.size(); ++p) {
      const double qp = b.position[p];
      if (qp == 0.0) continue;
      for (int k = 0; k < n_ctx_; ++k) {
        const double w = qp * b.context[k];
        if (w == 0.0) continue;
        add_a(o, p * n_ctx_ + k, w);
      }
    }
  }

  void credit_transition(const Categorical& prev_ctx, const Categorical& ctx) {
    if (!learn_b_) return;
    for (int j = 0; j < n_ctx_; ++j) {
      const double qj = prev_ctx[j];
      if (qj == 0.0) continue;
      for (int i = 0; i < n_ctx_; ++i) {
        const double w = qj * ctx[i];
        if (w != 0.0) add_b(i, j, w);
      }
    }
  }

  // Marginal observation likelihood over the (possibly uncertain) position at
  // a history step: l(ctx) = sum_p q(p) p(obs | p, ctx).
  std::vector<double> step_likelihood(const StepEntry& e) const {
    std::vector<double> l(n_ctx_, 0.0);
    for (std::size_t p = 0; p < e.filtered.position.size(); ++p) {
      const double qp = e.filtered.position[p];
      if (qp == 0.0) continue;
      for (int k = 0; k < n_ctx_; ++k)
        l[k] += qp * model_.obs_likelihood(e.obs, static_cast<int>(p), k);
    }
    return l;
  }

  /// The smoothing window of the sophisticated-learning variant: re-derives
  /// the count credit for the last `backwards_horizon` steps from smoothed
  /// posteriors, accumulating onto the in-tree tensors, and returns the
  /// aggregate Dirichlet divergence the window produced. All smoothed
  /// marginals come from the model state at node entry (one backward sweep).
  double window_block(int t) {
    const int start = std::max(0, t - cfg_.backwards_horizon);

    // Snapshot the columns the window can touch, for the divergence readout.
    touched_cols_.clear();
    if (learn_a_) {
      for (int tau = start; tau <= t; ++tau) {
        const StepEntry& e = entry(tau);
        for (std::size_t p = 0; p < e.filtered.position.size(); ++p)
          if (e.filtered.position[p] != 0.0)
            for (int k = 0; k < n_ctx_; ++k)
              touched_cols_.push_back(p * n_ctx_ + k);
      }
      std::sort(touched_cols_.begin(), touched_cols_.end());
      touched_cols_.erase(std::unique(touched_cols_.begin(), touched_cols_.end()),
                          touched_cols_.end());
      a_before_.clear();
      for (std::size_t col : touched_cols_) {
        const auto c = a_local_.column(col);
        a_before_.insert(a_before_.end(), c.begin(), c.end());
      }
    }
    std::vector<double> b_before;
    if (learn_b_) b_before = b_local_.raw();

    const StochasticMatrix trans = model_.transition.matrix();
    // backward sweep: beta_tau(s) = p(obs_{tau+1..t} | ctx_tau = s)
    const std::size_t window = static_cast<std::size_t>(t - start) + 1;
    smoothed_scratch_.assign(window, {});
    std::vector<double> beta(n_ctx_, 1.0), next(n_ctx_);
    for (int tau = t; tau >= start; --tau) {
      const StepEntry& e = entry(tau);
      std::vector<double> w(n_ctx_);
      double total = 0.0;
      for (int k = 0; k < n_ctx_; ++k) {
        w[k] = e.filtered.context[k] * beta[k];
        total += w[k];
      }
      if (total > 0.0)
        for (double& x : w) x /= total;
      else
        w = e.filtered.context.probs();
      smoothed_scratch_[tau - start] = Categorical(std::move(w));
      if (tau > start) {
        const std::vector<double> lik = step_likelihood(e);
        for (int s = 0; s < n_ctx_; ++s) {
          double acc = 0.0;
          for (int sp = 0; sp < n_ctx_; ++sp)
            acc += trans.at(sp, s) * lik[sp] * beta[sp];
          next[s] = acc;
        }
        beta.swap(next);
      }
    }

    for (int tau = start; tau <= t; ++tau) {
      const Categorical& smoothed = smoothed_scratch_[tau - start];
      const StepEntry& e = entry(tau);
      if (learn_a_) {
        const int o = static_cast<int>(e.obs.resource);
        for (std::size_t p = 0; p < e.filtered.position.size(); ++p) {
          const double qp = e.filtered.position[p];
          if (qp == 0.0) continue;
          for (int k = 0; k < n_ctx_; ++k) {
            const double w = qp * smoothed[k];
            if (w != 0.0) add_a(o, p * n_ctx_ + k, w);
          }
        }
      }
      if (learn_b_ && tau > 0) {
        const Categorical& prev = (tau == start)
                                      ? entry(tau - 1).filtered.context
                                      : smoothed_scratch_[tau - 1 - start];
        credit_transition(prev, smoothed);
      }
    }

    double novelty = 0.0;
    if (learn_a_) {
      std::size_t off = 0;
      for (std::size_t col : touched_cols_) {
        novelty += dirichlet_kl(
            a_local_.column(col),
            std::span<const double>(a_before_.data() + off, kNumResourceObs));
        off += kNumResourceObs;
      }
    }
    if (learn_b_) {
      for (int prev = 0; prev < n_ctx_; ++prev)
        novelty += dirichlet_kl(
            b_local_.column(prev),
            std::span<const double>(b_before.data() + prev * n_ctx_, n_ctx_));
    }
    return novelty;
  }

  // --- per-action immediate objective ---

  int context_obs_at(std::size_t cell, int ctx) const {
    return (static_cast<int>(cell) == base_.grid->hill) ? ctx : n_ctx_;
  }

  double immediate_value(const BeliefState& pred, const ResourceClocks& clk,
                         double novelty, int depth, EfeBreakdown* out_terms,
                         double* out_reward) {
    const auto raw = preferences(clk, pref_);
    // marginal predicted resource observation
    std::array<double, kNumResourceObs> q_res{};
    for (std::size_t p = 0; p < pred.position.size(); ++p) {
      const double qp = pred.position[p];
      if (qp == 0.0) continue;
      for (int k = 0; k < n_ctx_; ++k) {
        const double w = qp * pred.context[k];
        if (w == 0.0) continue;
        for (int o = 0; o < kNumResourceObs; ++o)
          q_res[o] += w * model_.likelihood.p(o, static_cast<int>(p), k);
      }
    }

    if (variant_.reward_based()) {
      double reward = 0.0;
      for (int o = 0; o < kNumResourceObs; ++o) reward += q_res[o] * raw[o];
      if (variant_.uses_ucb()) {
        const long t_ucb = std::max<long>(1, base_.ucb_t + depth);
        if (cfg_.ucb_count_mode == UcbCountMode::position) {
          for (std::size_t p = 0; p < pred.position.size(); ++p) {
            const double qp = pred.position[p];
            if (qp != 0.0)
              reward += qp * ucb_bonus(ucb_local_[p], t_ucb, cfg_.c_ucb);
          }
        }
        // action mode is handled by the caller, which knows the action index
      }
      if (out_reward) *out_reward = reward;
      return reward;
    }

    // epistemic term: mutual information between the joint predictive state
    // and the joint observation (both modalities)
    const auto log_pref = to_log_preference(raw, pref_.c);
    double prag = 0.0;
    for (int o = 0; o < kNumResourceObs; ++o)
      if (q_res[o] > 0.0) prag += q_res[o] * log_pref[o];

    double mi = 0.0;
    if (variant_.uses_epistemic()) {
      q_joint_.assign(static_cast<std::size_t>(kNumResourceObs) * n_ctx_obs_, 0.0);
      for (std::size_t p = 0; p < pred.position.size(); ++p) {
        const double qp = pred.position[p];
        if (qp == 0.0) continue;
        for (int k = 0; k < n_ctx_; ++k) {
          const double w = qp * pred.context[k];
          if (w == 0.0) continue;
          const int oc = context_obs_at(p, k);
          for (int o = 0; o < kNumResourceObs; ++o) {
            const double po = model_.likelihood.p(o, static_cast<int>(p), k);
            if (po > 0.0) q_joint_[o * n_ctx_obs_ + oc] += w * po;
          }
        }
      }
      for (std::size_t p = 0; p < pred.position.size(); ++p) {
        const double qp = pred.position[p];
        if (qp == 0.0) continue;
        for (int k = 0; k < n_ctx_; ++k) {
          const double w = qp * pred.context[k];
          if (w == 0.0) continue;
          const int oc = context_obs_at(p, k);
          for (int o = 0; o < kNumResourceObs; ++o) {
            const double po = model_.likelihood.p(o, static_cast<int>(p), k);
            const double qo = q_joint_[o * n_ctx_obs_ + oc];
            if (po > 0.0 && qo > 0.0) mi += w * po * std::log(po / qo);
          }
        }
      }
    }

    if (out_terms) {
      out_terms->epistemic = mi;
      out_terms->novelty = novelty;
      out_terms->pragmatic = prag;
    }
    // internal values are "higher is better": the negated expected free energy
    return mi + novelty + prag;
  }

  // --- observation expansion ---

  struct ObsBranch {
    Observation obs;
    double weight;
  };

  void expand_observations(std::size_t cell, int ctx,
                           std::vector<ObsBranch>& out) {
    out.clear();
    const int oc = context_obs_at(cell, ctx);
    if (cfg_.observation_expansion == ObsExpansion::sample_one) {
      std::array<double, kNumResourceObs> w;
      for (int o = 0; o < kNumResourceObs; ++o)
        w[o] = model_.likelihood.p(o, static_cast<int>(cell), ctx);
      if (rng_ == nullptr)
        throw std::invalid_argument("sample_one expansion requires an rng");
      const auto o = rng_->sample_weights(w);
      out.push_back({Observation{static_cast<ResourceObs>(o), oc}, 1.0});
      return;
    }
    double kept = 0.0;
    for (int o = 0; o < kNumResourceObs; ++o) {
      const double po = model_.likelihood.p(o, static_cast<int>(cell), ctx);
      if (po > 0.0 && po >= cfg_.state_prune_threshold) {
        out.push_back({Observation{static_cast<ResourceObs>(o), oc}, po});
        kept += po;
      }
    }
    if (out.empty()) {
      int best = 0;
      double pb = -1.0;
      for (int o = 0; o < kNumResourceObs; ++o) {
        const double po = model_.likelihood.p(o, static_cast<int>(cell), ctx);
        if (po > pb) {
          pb = po;
          best = o;
        }
      }
      out.push_back({Observation{static_cast<ResourceObs>(best), oc}, 1.0});
      return;
    }
    for (auto& b : out) b.weight /= kept;
  }

  // --- memo keys ---

  std::uint32_t quantize(double q) const {
    return static_cast<std::uint32_t>(std::llround(q * quant_scale_));
  }

  void append_u32(std::string& s, std::uint32_t v) const {
    char buf[4];
    std::memcpy(buf, &v, 4);
    s.append(buf, 4);
  }

  std::string make_key(int depth, const BeliefState& prior,
                       const ResourceClocks& clk, const Observation& obs) const {
    std::string key;
    key.reserve(24 + 8 * prior.context.size());
    key.push_back(static_cast<char>(depth));
    key.push_back(static_cast<char>(obs.resource));
    key.push_back(static_cast<char>(obs.context_obs));
    append_u32(key, static_cast<std::uint32_t>(clk.food));
    append_u32(key, static_cast<std::uint32_t>(clk.water));
    append_u32(key, static_cast<std::uint32_t>(clk.sleep));
    for (std::size_t k = 0; k < prior.context.size(); ++k)
      append_u32(key, quantize(prior.context[k]));
    for (std::size_t p = 0; p < prior.position.size(); ++p) {
      const std::uint32_t q = quantize(prior.position[p]);
      if (q == 0) continue;
      append_u32(key, static_cast<std::uint32_t>(p));
      append_u32(key, q);
    }
    return key;
  }

  // --- aggregation ---

  double soft_aggregate(const std::array<double, kNumActions>& values) const {
    std::array<double, kNumActions> w;
    softmax(values, cfg_.softmax_temperature, w);
    double s = 0.0;
    for (int i = 0; i < kNumActions; ++i) s += w[i] * values[i];
    return s;
  }

  NodeResult child_value(const BeliefState& prior, const ResourceClocks& clk,
                         const Observation& obs, Action action, int depth) {
    if (!cfg_.memoization) return search_node(prior, clk, obs, action, depth);
    const std::string key = make_key(depth, prior, clk, obs);
    if (NodeResult* cached = memo_.find(key)) {
      if (cfg_.check_memo_consistency) {
        const NodeResult fresh = search_node(prior, clk, obs, action, depth);
        for (int i = 0; i < kNumActions; ++i)
          if (std::fabs(fresh.values[i] - cached->values[i]) > 1e-9)
            throw std::logic_error("memo consistency violation");
      }
      return *cached;
    }
    NodeResult r = search_node(prior, clk, obs, action, depth);
    memo_.insert(key, r);
    return r;
  }

  NodeResult search_node(const BeliefState& prior, ResourceClocks clk,
                         const Observation& pending, Action action_into,
                         int depth) {
    ++calls_;
    const int t = true_t_ + depth;

    NodeResult result;
    if (depth == 0) {
      result.posterior = prior;
    } else {
      auto upd = condition_factored(prior, [&](std::size_t cell, std::size_t ctx) {
        return model_.obs_likelihood(pending, static_cast<int>(cell),
                                     static_cast<int>(ctx));
      });
      result.posterior = std::move(upd.belief);
      clk = clk.advanced(pending.resource);
    }
    const BeliefState& post = result.posterior;

    bool dead = false;
    for (int i = 0; i < kNumResources; ++i)
      if (clk[i] >= pref_.limits[i]) dead = true;

    const std::size_t undo_mark = undo_.size();
    const std::size_t ucb_mark = ucb_undo_.size();
    if (depth > 0)
      sim_.push_back(StepEntry{action_into, pending, post, post.context});

    double novelty = 0.0;
    if (!dead && (learn_a_ || learn_b_)) {
      if (variant_.smooth_in_tree()) {
        novelty = window_block(t);
      } else if (variant_.learn_in_tree() && depth > 0) {
        credit_joint(post, pending);
        if (learn_b_ && t > 0)
          credit_transition(entry(t - 1).filtered.context, post.context);
      }
    }

    std::array<BeliefState, kNumActions> pred;
    std::array<EfeBreakdown, kNumActions> terms;
    for (int a = 0; a < kNumActions; ++a) {
      pred[a] = predict_belief(post, static_cast<Action>(a), model_);
      result.values[a] =
          immediate_value(pred[a], clk, novelty, depth,
                          cfg_.trace ? &terms[a] : nullptr, nullptr);
      if (variant_.uses_ucb() && cfg_.ucb_count_mode == UcbCountMode::action)
        result.values[a] += ucb_bonus(ucb_local_[a],
                                      std::max<long>(1, base_.ucb_t + depth),
                                      cfg_.c_ucb);
    }

    if (depth < cfg_.horizon && !dead) {
      const auto viable = viable_actions(result.values, cfg_.action_prune_margin);
      for (int a : viable) {
        const auto poss = likely_states(pred[a].position, cfg_.state_prune_threshold);
        const auto ctxs = likely_states(pred[a].context, cfg_.state_prune_threshold);
        double wnorm = 0.0;
        for (int p : poss)
          for (int k : ctxs) wnorm += pred[a].position[p] * pred[a].context[k];
        if (wnorm <= 0.0) continue;
        double agg = 0.0;
        for (int p : poss) {
          for (int k : ctxs) {
            const double ws = pred[a].position[p] * pred[a].context[k] / wnorm;
            if (ws == 0.0) continue;
            if (variant_.uses_ucb() &&
                cfg_.ucb_count_mode == UcbCountMode::position) {
              ucb_undo_.push_back(p);
              ++ucb_local_[p];
            }
            if (variant_.uses_ucb() && cfg_.ucb_count_mode == UcbCountMode::action) {
              ucb_undo_.push_back(a);
              ++ucb_local_[a];
            }
            expand_observations(static_cast<std::size_t>(p), k, obs_scratch_);
            // local copy: expand_observations reuses the scratch buffer in
            // recursive calls
            const std::vector<ObsBranch> branches = obs_scratch_;
            for (const ObsBranch& ob : branches) {
              const NodeResult child =
                  child_value(pred[a], clk, ob.obs, static_cast<Action>(a),
                              depth + 1);
              agg += ws * ob.weight * soft_aggregate(child.values);
            }
          }
        }
        result.values[a] += agg;
      }
    }

    if (cfg_.trace) {
      for (int a = 0; a < kNumActions; ++a) {
        (*cfg_.trace) << t << ',' << depth << ',' << to_string(static_cast<Action>(a))
                      << ',' << terms[a].epistemic << ',' << terms[a].novelty
                      << ',' << terms[a].pragmatic << ',' << result.values[a]
                      << '\n';
      }
    }

    rollback(undo_mark);
    while (ucb_undo_.size() > ucb_mark) {
      --ucb_local_[ucb_undo_.back()];
      ucb_undo_.pop_back();
    }
    if (depth > 0) sim_.pop_back();
    return result;
  }

  SearchProblem base_;
  SearchConfig cfg_;
  SearchVariant variant_;
  PreferenceSpec pref_;
  WorldModel model_;

  int n_ctx_ = 0;
  int n_ctx_obs_ = 0;
  double quant_scale_ = 1e4;
  bool learn_a_ = false;
  bool learn_b_ = false;

  DirichletCounts a_local_;
  DirichletCounts b_local_;
  std::vector<long> ucb_local_;
  std::vector<CountUndo> undo_;
  std::vector<int> ucb_undo_;
  std::vector<StepEntry> sim_;
  MemoTable memo_;
  std::size_t calls_ = 0;
  int true_t_ = 0;
  Rng* rng_ = nullptr;

  // scratch
  std::vector<double> q_joint_;
  std::vector<std::size_t> touched_cols_;
  std::vector<double> a_before_;
  std::vector<ObsBranch> obs_scratch_;
  std::vector<Categorical> smoothed_scratch_;
};

/// Argmax action of a root search; ties break by the fixed action order
/// (up, down, left, right, stay).
inline Action plan(TreeSearch& search, const BeliefState& belief,
                   const ResourceClocks& clocks, Rng* rng = nullptr) {
  const auto root = search.run(belief, clocks, rng);
  int best = 0;
  for (int a = 1; a < kNumActions; ++a)
    if (root.values[a] > root.values[best]) best = a;
  return static_cast<Action>(best);
}

struct CallCounts {
  std::size_t with_memo = 0;
  std::size_t without_memo = 0;
  std::array<double, kNumActions> values_with{};
  std::array<double, kNumActions> values_without{};
};

/// Instrumented double run of the same search with memoization on and off.
inline CallCounts count_function_calls(const SearchProblem& problem,
                                       SearchConfig cfg,
                                       const SearchVariant& variant,
                                       const PreferenceSpec& pref,
                                       const BeliefState& belief,
                                       const ResourceClocks& clocks,
                                       Rng* rng = nullptr) {
  CallCounts out;
  cfg.memoization = true;
  {
    TreeSearch ts(problem, cfg, variant, pref);
    const auto r = ts.run(belief, clocks, rng);
    out.with_memo = r.calls;
    out.values_with = r.values;
  }
  cfg.memoization = false;
  {
    TreeSearch ts(problem, cfg, variant, pref);
    const auto r = ts.run(belief, clocks, rng);
    out.without_memo = r.calls;
    out.values_without = r.values;
  }
  return out;
}

}  // namespace forage
