#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "forage/agent.hpp"
#include "forage/config.hpp"
#include "forage/csvio.hpp"
#include "forage/env.hpp"
#include "forage/rng.hpp"

namespace forage {

inline ScenarioFlags scenario_flags(Scenario s) {
  switch (s) {
    case Scenario::full_model: return {true, true};
    case Scenario::unknown_likelihood: return {false, true};
    case Scenario::unknown_transition: return {true, false};
  }
  return {true, true};
}

struct TrialContext {
  Algo algo = Algo::si;
  int episode = 0;
  int iteration = 0;
  const GridWorld* grid = nullptr;
  int start_cell = 0;
  std::uint64_t seed = 0;
};

/// Optional instrumentation. on_step fires after each environment step with
/// the agent's chosen action, the resulting position and observation.
struct ExperimentHooks {
  std::function<void(const TrialContext&)> on_trial_start;
  std::function<void(const TrialContext&, int t, int position,
                     const Observation& obs, Action action)>
      on_step;
  std::function<void(const TrialContext&, const Agent&)> on_trial_end;
};

inline AgentConfig make_agent_config(const ExperimentConfig& cfg, Algo algo) {
  AgentConfig ac;
  ac.algo = algo;
  ac.search = cfg.search;
  ac.pref = cfg.pref;
  ac.alpha0 = cfg.alpha0;
  ac.scenario = scenario_flags(cfg.scenario);
  ac.warn_on_degenerate = false;
  return ac;
}

inline GridWorld make_episode_grid(const ExperimentConfig& cfg, int episode) {
  GridWorld g = GridWorld::standard(cfg.grid.width, cfg.grid.height,
                                    cfg.grid.contexts, cfg.grid.stay_prob);
  g.limits = cfg.pref.limits;
  const std::uint64_t layout_seed =
      cfg.layout_per_episode
          ? derive_seed(cfg.master_seed, {0x17A0, static_cast<std::uint64_t>(episode)})
          : derive_seed(cfg.master_seed, {0x17A0});
  generate_layout(layout_seed, cfg.grid.k, g);
  return g;
}

inline int pick_start_cell(const ExperimentConfig& cfg, const GridWorld& grid,
                           std::uint64_t trial_seed) {
  if (cfg.start_cell >= 0) return cfg.start_cell;
  Rng rng(derive_seed(trial_seed, {0x57A7}));
  int cell;
  do {
    cell = static_cast<int>(rng.uniform_index(grid.cells()));
  } while (cell == grid.hill);
  return cell;
}

/// Runs one iteration of one agent to termination and returns its record.
inline TrialRecord run_trial(Agent& agent, const GridWorld& grid,
                             const ExperimentConfig& cfg, Algo algo, int episode,
                             int iteration, const ExperimentHooks* hooks) {
  const std::uint64_t trial_seed = derive_seed(
      cfg.master_seed, {static_cast<std::uint64_t>(algo),
                        static_cast<std::uint64_t>(episode),
                        static_cast<std::uint64_t>(iteration)});
  Rng env_rng(derive_seed(trial_seed, {0xE14}));
  const int start_cell = pick_start_cell(cfg, grid, trial_seed);

  EnvState state;
  state.position = start_cell;
  state.context = static_cast<int>(
      Rng(derive_seed(trial_seed, {0xC0})).uniform_index(grid.n_contexts));
  agent.reset_for_iteration(start_cell);

  TrialContext ctx{algo, episode, iteration, &grid, start_cell, trial_seed};
  if (hooks && hooks->on_trial_start) hooks->on_trial_start(ctx);

  TrialRecord rec;
  rec.algorithm = algo;
  rec.episode = episode;
  rec.iteration = iteration;
  rec.seed = trial_seed;

  Observation obs = observe(state, grid);
  int steps = 0;
  for (int k = 1; k <= cfg.max_steps; ++k) {
    const Action action = agent.act(obs);
    const StepResult sr = step(state, action, grid, env_rng);
    obs = sr.obs;
    steps = k;
    if (state.position == grid.hill) ++rec.hill_visits;
    if (hooks && hooks->on_step)
      hooks->on_step(ctx, k, state.position, obs, action);
    if (sr.outcome == StepOutcome::dead) {
      rec.death_cause = sr.violated;
      break;
    }
  }
  rec.steps_survived = steps;
  // A death on the very last step still counts as reaching the horizon.
  rec.max_steps_reached = (steps == cfg.max_steps);
  if (rec.max_steps_reached) rec.death_cause = {false, false, false};
  rec.model_error = agent.model_error();
  if (hooks && hooks->on_trial_end) hooks->on_trial_end(ctx, agent);
  return rec;
}

/// Runs the full protocol: for each algorithm and episode a fresh agent plays
/// `iterations` consecutive trials with knowledge carried across iterations.
/// Records stream through `sink` as they complete and are also returned.
/// Deterministic given the master seed (with workers = 1 the file order is
/// deterministic too; keys make order irrelevant to analysis).
inline std::vector<TrialRecord> run_experiment(
    const ExperimentConfig& cfg,
    const std::function<void(const TrialRecord&)>& sink = nullptr,
    const ExperimentHooks* hooks = nullptr) {
  struct Unit {
    Algo algo;
    int episode;
  };
  std::vector<Unit> units;
  for (Algo a : cfg.algorithms)
    for (int e = 0; e < cfg.episodes; ++e) units.push_back({a, e});

  std::vector<TrialRecord> all;
  all.reserve(units.size() * cfg.iterations);
  std::mutex sink_mutex;

  auto run_unit = [&](const Unit& u) {
    const GridWorld grid = make_episode_grid(cfg, u.episode);
    Agent agent(make_agent_config(cfg, u.algo), &grid,
                derive_seed(cfg.master_seed,
                            {0xA6E7, static_cast<std::uint64_t>(u.algo),
                             static_cast<std::uint64_t>(u.episode)}));
    std::vector<TrialRecord> unit_records;
    unit_records.reserve(cfg.iterations);
    for (int it = 0; it < cfg.iterations; ++it)
      unit_records.push_back(
          run_trial(agent, grid, cfg, u.algo, u.episode, it, hooks));
    std::lock_guard<std::mutex> lock(sink_mutex);
    for (const auto& r : unit_records) {
      if (sink) sink(r);
      all.push_back(r);
    }
  };

  const int workers = std::max(1, cfg.workers);
  if (workers == 1) {
    for (const Unit& u : units) run_unit(u);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= units.size()) return;
          run_unit(units[i]);
        }
      });
    for (auto& th : pool) th.join();
  }
  return all;
}

}  // namespace forage
