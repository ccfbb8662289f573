#pragma once

#include <cstdio>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "forage/agent.hpp"
#include "forage/env.hpp"

namespace forage {

inline constexpr int kSnapshotVersion = 1;

namespace detail {

inline void write_double(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

}  // namespace detail

/// Versioned text snapshot of an agent and the world it lives in: enough to
/// rebuild both and replay an iteration.
inline void save_agent_state(std::ostream& os, const Agent& agent) {
  const GridWorld& g = agent.grid();
  const AgentConfig& c = agent.config();
  os << "forage-agent-state " << kSnapshotVersion << '\n';
  os << "algo " << to_string(c.algo) << '\n';
  os << "grid " << g.width << ' ' << g.height << ' ' << g.n_contexts << '\n';
  os << "limits " << g.limits[0] << ' ' << g.limits[1] << ' ' << g.limits[2] << '\n';
  os << "context_matrix";
  for (double v : g.context_matrix.m) {
    os << ' ';
    detail::write_double(os, v);
  }
  os << '\n';
  for (int ctx = 0; ctx < g.n_contexts; ++ctx)
    for (int cell = 0; cell < g.cells(); ++cell)
      if (g.layout[ctx][cell] != 0)
        os << "layout " << ctx << ' ' << cell << ' '
           << static_cast<int>(g.layout[ctx][cell]) << '\n';
  os << "scenario " << (c.scenario.likelihood_known ? 1 : 0) << ' '
     << (c.scenario.transition_known ? 1 : 0) << '\n';
  os << "alpha0 ";
  detail::write_double(os, c.alpha0);
  os << '\n';
  os << "pref ";
  detail::write_double(os, c.pref.empty_reward);
  os << ' ';
  detail::write_double(os, c.pref.penalty);
  os << ' ';
  detail::write_double(os, c.pref.c);
  os << '\n';
  os << "search " << c.search.horizon << ' ' << c.search.state_prune_threshold
     << ' ' << c.search.action_prune_margin << ' '
     << c.search.softmax_temperature << ' '
     << (c.search.observation_expansion == ObsExpansion::sample_one ? 1 : 0)
     << ' ' << c.search.backwards_horizon << ' '
     << (c.search.memoization ? 1 : 0) << ' ' << c.search.belief_quantization
     << ' ' << (c.search.ucb_count_mode == UcbCountMode::action ? 1 : 0) << ' '
     << c.search.c_ucb << '\n';
  os << "global_steps " << agent.global_steps() << '\n';
  if (agent.a_counts()) {
    os << "a_counts " << agent.a_counts()->outcomes() << ' '
       << agent.a_counts()->cells();
    for (double v : agent.a_counts()->raw()) {
      os << ' ';
      detail::write_double(os, v);
    }
    os << '\n';
  }
  if (agent.b_counts()) {
    os << "b_counts " << agent.b_counts()->outcomes() << ' '
       << agent.b_counts()->cells();
    for (double v : agent.b_counts()->raw()) {
      os << ' ';
      detail::write_double(os, v);
    }
    os << '\n';
  }
  if (!agent.ucb_counts().empty()) {
    os << "ucb " << agent.ucb_counts().size();
    for (long v : agent.ucb_counts()) os << ' ' << v;
    os << '\n';
  }
  os << "end\n";
}

struct LoadedState {
  GridWorld grid;
  AgentConfig config;
  std::optional<DirichletCounts> a_counts;
  std::optional<DirichletCounts> b_counts;
  std::vector<long> ucb_counts;
  long global_steps = 0;
};

inline LoadedState load_agent_state(std::istream& is) {
  LoadedState st;
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument("snapshot: empty stream");
  {
    std::istringstream h(line);
    std::string magic;
    int version = 0;
    h >> magic >> version;
    if (magic != "forage-agent-state" || version != kSnapshotVersion)
      throw std::invalid_argument("snapshot: bad header: " + line);
  }
  bool have_grid = false;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key.empty()) continue;
    if (key == "end") break;
    if (key == "algo") {
      std::string a;
      ls >> a;
      st.config.algo = parse_algo(a);
    } else if (key == "grid") {
      int w, h, n;
      ls >> w >> h >> n;
      st.grid = GridWorld::standard(w, h, n);
      have_grid = true;
    } else if (key == "limits") {
      ls >> st.grid.limits[0] >> st.grid.limits[1] >> st.grid.limits[2];
      st.config.pref.limits = st.grid.limits;
    } else if (key == "context_matrix") {
      for (double& v : st.grid.context_matrix.m) ls >> v;
    } else if (key == "layout") {
      int ctx, cell, res;
      ls >> ctx >> cell >> res;
      if (!have_grid) throw std::invalid_argument("snapshot: layout before grid");
      st.grid.layout[ctx][cell] = static_cast<std::uint8_t>(res);
    } else if (key == "scenario") {
      int lk, tk;
      ls >> lk >> tk;
      st.config.scenario = {lk != 0, tk != 0};
    } else if (key == "alpha0") {
      ls >> st.config.alpha0;
    } else if (key == "pref") {
      ls >> st.config.pref.empty_reward >> st.config.pref.penalty >>
          st.config.pref.c;
    } else if (key == "search") {
      int sample = 0, memo = 1, ucbmode = 0;
      ls >> st.config.search.horizon >> st.config.search.state_prune_threshold >>
          st.config.search.action_prune_margin >>
          st.config.search.softmax_temperature >> sample >>
          st.config.search.backwards_horizon >> memo >>
          st.config.search.belief_quantization >> ucbmode >>
          st.config.search.c_ucb;
      st.config.search.observation_expansion =
          sample ? ObsExpansion::sample_one : ObsExpansion::enumerate_above_threshold;
      st.config.search.memoization = memo != 0;
      st.config.search.ucb_count_mode =
          ucbmode ? UcbCountMode::action : UcbCountMode::position;
    } else if (key == "global_steps") {
      ls >> st.global_steps;
    } else if (key == "a_counts" || key == "b_counts") {
      std::size_t outcomes, cells;
      ls >> outcomes >> cells;
      DirichletCounts dc(outcomes, cells, 1.0,
                         key == "a_counts" ? CountRole::likelihood
                                           : CountRole::transition);
      for (std::size_t cell = 0; cell < cells; ++cell)
        for (std::size_t o = 0; o < outcomes; ++o) {
          double v;
          ls >> v;
          dc.set(o, cell, v);
        }
      if (key == "a_counts") st.a_counts = std::move(dc);
      else st.b_counts = std::move(dc);
    } else if (key == "ucb") {
      std::size_t n;
      ls >> n;
      st.ucb_counts.resize(n);
      for (auto& v : st.ucb_counts) ls >> v;
    } else {
      throw std::invalid_argument("snapshot: unknown key: " + key);
    }
  }
  if (!have_grid) throw std::invalid_argument("snapshot: missing grid");
  return st;
}

/// Rebuilds an agent from a loaded snapshot. The grid in the returned state
/// must outlive the agent.
inline std::unique_ptr<Agent> restore_agent(const LoadedState& st,
                                            const GridWorld* grid,
                                            std::uint64_t seed) {
  auto agent = std::make_unique<Agent>(st.config, grid, seed);
  agent->set_counts(st.a_counts, st.b_counts);
  if (!st.ucb_counts.empty()) agent->set_ucb_counts(st.ucb_counts);
  agent->set_global_steps(st.global_steps);
  return agent;
}

}  // namespace forage
