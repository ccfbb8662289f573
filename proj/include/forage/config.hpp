#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "forage/planner.hpp"
#include "forage/valuation.hpp"

namespace forage {

enum class Scenario { full_model, unknown_likelihood, unknown_transition };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::full_model: return "full-model";
    case Scenario::unknown_likelihood: return "unknown-likelihood";
    case Scenario::unknown_transition: return "unknown-transition";
  }
  return "?";
}

inline Scenario parse_scenario(const std::string& s) {
  if (s == "full-model") return Scenario::full_model;
  if (s == "unknown-likelihood") return Scenario::unknown_likelihood;
  if (s == "unknown-transition") return Scenario::unknown_transition;
  throw std::invalid_argument("unknown scenario: " + s);
}

struct GridConfig {
  int width = 10;
  int height = 10;
  int contexts = 4;
  double stay_prob = 0.95;
  int k = 1;  // resource cells per resource per context
};

/// Full experiment description; every named default of the toolkit lives
/// here and is overridable through the flat key=value config file.
struct ExperimentConfig {
  Scenario scenario = Scenario::unknown_likelihood;
  std::vector<Algo> algorithms = {Algo::sl, Algo::si, Algo::ba, Algo::ba_ucb};
  int episodes = 30;
  int iterations = 120;
  int max_steps = 100;
  std::uint64_t master_seed = 12345;
  GridConfig grid;
  SearchConfig search;
  PreferenceSpec pref;
  double alpha0 = 0.25;
  int start_cell = -1;  // -1: seeded uniform non-hill cell per iteration
  bool layout_per_episode = true;
  bool save_states = false;
  int workers = 1;
};

/// CI-friendly and paper-sized presets.
inline void apply_profile(ExperimentConfig& cfg, const std::string& profile) {
  if (profile == "desk") {
    cfg.episodes = 10;
    cfg.iterations = 60;
    cfg.search.horizon = 3;
  } else if (profile == "paper") {
    cfg.episodes = 30;
    cfg.iterations = 120;
    cfg.search.horizon = 4;
  } else {
    throw std::invalid_argument("unknown profile: " + profile);
  }
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw std::invalid_argument("bad boolean: " + v);
}

}  // namespace detail

/// Parses the flat key = value format ('#' starts a comment). Unknown keys
/// are an error so typos do not silently fall back to defaults.
inline ExperimentConfig parse_config(std::istream& in,
                                     ExperimentConfig cfg = ExperimentConfig{}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    try {
      if (key == "scenario") cfg.scenario = parse_scenario(val);
      else if (key == "algorithms") {
        cfg.algorithms.clear();
        std::stringstream ss(val);
        std::string tok;
        while (std::getline(ss, tok, ','))
          cfg.algorithms.push_back(parse_algo(detail::trim(tok)));
      } else if (key == "episodes") cfg.episodes = std::stoi(val);
      else if (key == "iterations") cfg.iterations = std::stoi(val);
      else if (key == "max_steps") cfg.max_steps = std::stoi(val);
      else if (key == "master_seed") cfg.master_seed = std::stoull(val);
      else if (key == "grid.width") cfg.grid.width = std::stoi(val);
      else if (key == "grid.height") cfg.grid.height = std::stoi(val);
      else if (key == "grid.contexts") cfg.grid.contexts = std::stoi(val);
      else if (key == "grid.stay_prob") cfg.grid.stay_prob = std::stod(val);
      else if (key == "grid.k") cfg.grid.k = std::stoi(val);
      else if (key == "limits.food") cfg.pref.limits[0] = std::stoi(val);
      else if (key == "limits.water") cfg.pref.limits[1] = std::stoi(val);
      else if (key == "limits.sleep") cfg.pref.limits[2] = std::stoi(val);
      else if (key == "penalty") cfg.pref.penalty = std::stod(val);
      else if (key == "empty_reward") cfg.pref.empty_reward = std::stod(val);
      else if (key == "preference_precision") cfg.pref.c = std::stod(val);
      else if (key == "alpha0") cfg.alpha0 = std::stod(val);
      else if (key == "start_cell")
        cfg.start_cell = (val == "random") ? -1 : std::stoi(val);
      else if (key == "layout_per_episode")
        cfg.layout_per_episode = detail::parse_bool(val);
      else if (key == "save_states") cfg.save_states = detail::parse_bool(val);
      else if (key == "workers") cfg.workers = std::stoi(val);
      else if (key == "search.horizon") cfg.search.horizon = std::stoi(val);
      else if (key == "search.state_prune_threshold")
        cfg.search.state_prune_threshold = std::stod(val);
      else if (key == "search.action_prune_margin")
        cfg.search.action_prune_margin = std::stod(val);
      else if (key == "search.softmax_temperature")
        cfg.search.softmax_temperature = std::stod(val);
      else if (key == "search.obs_expansion")
        cfg.search.observation_expansion =
            (val == "sample") ? ObsExpansion::sample_one
                              : ObsExpansion::enumerate_above_threshold;
      else if (key == "search.backwards_horizon")
        cfg.search.backwards_horizon = std::stoi(val);
      else if (key == "search.memoization")
        cfg.search.memoization = detail::parse_bool(val);
      else if (key == "search.belief_quantization")
        cfg.search.belief_quantization = std::stoi(val);
      else if (key == "search.ucb_count_mode")
        cfg.search.ucb_count_mode = (val == "action") ? UcbCountMode::action
                                                      : UcbCountMode::position;
      else if (key == "search.c_ucb") cfg.search.c_ucb = std::stod(val);
      else
        throw std::invalid_argument("unknown key");
    } catch (const std::exception& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  " (" + key + "): " + e.what());
    }
  }
  if (cfg.episodes < 1 || cfg.iterations < 1 || cfg.max_steps < 1)
    throw std::invalid_argument("episodes, iterations, max_steps must be >= 1");
  return cfg;
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "scenario = " << to_string(cfg.scenario) << '\n';
  os << "algorithms = ";
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i)
    os << (i ? "," : "") << to_string(cfg.algorithms[i]);
  os << '\n';
  os << "episodes = " << cfg.episodes << '\n';
  os << "iterations = " << cfg.iterations << '\n';
  os << "max_steps = " << cfg.max_steps << '\n';
  os << "master_seed = " << cfg.master_seed << '\n';
  os << "grid.width = " << cfg.grid.width << '\n';
  os << "grid.height = " << cfg.grid.height << '\n';
  os << "grid.contexts = " << cfg.grid.contexts << '\n';
  os << "grid.stay_prob = " << cfg.grid.stay_prob << '\n';
  os << "grid.k = " << cfg.grid.k << '\n';
  os << "limits.food = " << cfg.pref.limits[0] << '\n';
  os << "limits.water = " << cfg.pref.limits[1] << '\n';
  os << "limits.sleep = " << cfg.pref.limits[2] << '\n';
  os << "penalty = " << cfg.pref.penalty << '\n';
  os << "empty_reward = " << cfg.pref.empty_reward << '\n';
  os << "preference_precision = " << cfg.pref.c << '\n';
  os << "alpha0 = " << cfg.alpha0 << '\n';
  os << "start_cell = ";
  if (cfg.start_cell < 0) os << "random"; else os << cfg.start_cell;
  os << '\n';
  os << "layout_per_episode = " << (cfg.layout_per_episode ? "true" : "false") << '\n';
  os << "save_states = " << (cfg.save_states ? "true" : "false") << '\n';
  os << "workers = " << cfg.workers << '\n';
  os << "search.horizon = " << cfg.search.horizon << '\n';
  os << "search.state_prune_threshold = " << cfg.search.state_prune_threshold << '\n';
  os << "search.action_prune_margin = " << cfg.search.action_prune_margin << '\n';
  os << "search.softmax_temperature = " << cfg.search.softmax_temperature << '\n';
  os << "search.obs_expansion = "
     << (cfg.search.observation_expansion == ObsExpansion::sample_one
             ? "sample" : "enumerate") << '\n';
  os << "search.backwards_horizon = " << cfg.search.backwards_horizon << '\n';
  os << "search.memoization = " << (cfg.search.memoization ? "true" : "false") << '\n';
  os << "search.belief_quantization = " << cfg.search.belief_quantization << '\n';
  os << "search.ucb_count_mode = "
     << (cfg.search.ucb_count_mode == UcbCountMode::action ? "action" : "position")
     << '\n';
  os << "search.c_ucb = " << cfg.search.c_ucb << '\n';
  return os.str();
}

}  // namespace forage
