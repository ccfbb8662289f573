// Command-line front end: run experiments, summarize record files, plot
// learning curves and replay saved agent states.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "forage/agent.hpp"
#include "forage/config.hpp"
#include "forage/csvio.hpp"
#include "forage/env.hpp"
#include "forage/experiment.hpp"
#include "forage/snapshot.hpp"
#include "forage/stats.hpp"
#include "forage/svg.hpp"

namespace fs = std::filesystem;
using namespace forage;

namespace {

ExperimentConfig load_config_file(const std::string& path) {
  if (path.empty()) return ExperimentConfig{};
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_config(in);
}

int cmd_run(const std::string& config_path, const std::string& profile,
            const std::string& out_dir, std::uint64_t seed, bool seed_set,
            bool trace) {
  ExperimentConfig cfg = load_config_file(config_path);
  if (!profile.empty()) apply_profile(cfg, profile);
  if (seed_set) cfg.master_seed = seed;

  fs::create_directories(out_dir);
  {
    std::ofstream cf(fs::path(out_dir) / "config.txt");
    cf << serialize_config(cfg);
  }
  {
    std::string layouts = "episode,context,x,y,resource\n";
    for (int e = 0; e < cfg.episodes; ++e) {
      const GridWorld g = make_episode_grid(cfg, e);
      append_layout_csv(g, e, layouts);
    }
    std::ofstream lf(fs::path(out_dir) / "layouts.csv");
    lf << layouts;
  }

  std::ofstream trace_file;
  if (trace) {
    trace_file.open(fs::path(out_dir) / "trace.csv");
    trace_file << "t,depth,action,epistemic,novelty,pragmatic,value\n";
    cfg.search.trace = &trace_file;
    cfg.workers = 1;
  }

  std::ofstream records_file(fs::path(out_dir) / "records.csv");
  if (!records_file)
    throw std::runtime_error("cannot write records to " + out_dir);
  records_file << record_csv_header() << '\n';

  ExperimentHooks hooks;
  if (cfg.save_states) {
    hooks.on_trial_end = [&](const TrialContext& ctx, const Agent& agent) {
      if (ctx.iteration + 1 != cfg.iterations) return;
      std::string name = std::string("state_") + to_string(ctx.algo) + "_ep" +
                         std::to_string(ctx.episode) + ".txt";
      for (auto& ch : name)
        if (ch == '+') ch = 'p';
      std::ofstream sf(fs::path(out_dir) / name);
      save_agent_state(sf, agent);
    };
  }

  const auto t0 = std::chrono::steady_clock::now();
  const auto records = run_experiment(
      cfg,
      [&](const TrialRecord& r) {
        records_file << to_csv(r) << '\n';
        records_file.flush();  // crash-safe append
      },
      &hooks);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::map<std::string, std::pair<double, int>> by_algo;
  for (const auto& r : records) {
    auto& [sum, n] = by_algo[to_string(r.algorithm)];
    sum += r.steps_survived;
    ++n;
  }
  std::cout << "wrote " << records.size() << " records to " << out_dir
            << "/records.csv in " << std::fixed << std::setprecision(1) << secs
            << "s\n";
  for (const auto& [name, sn] : by_algo)
    std::cout << "  " << name << ": mean survival "
              << std::setprecision(2) << sn.first / sn.second << " over "
              << sn.second << " trials\n";
  return 0;
}

int cmd_stats(const std::string& records_path, const std::string& window) {
  std::ifstream in(records_path);
  if (!in) throw std::runtime_error("cannot open records: " + records_path);
  const auto records = parse_records_csv(in);
  if (records.empty()) throw std::runtime_error("no records found");

  int lo = 0, hi = 0;
  for (const auto& r : records) hi = std::max(hi, r.iteration);
  if (!window.empty()) {
    const auto dots = window.find("..");
    if (dots == std::string::npos)
      throw std::runtime_error("window must be a..b");
    lo = std::stoi(window.substr(0, dots));
    hi = std::stoi(window.substr(dots + 2));
  }

  std::cout << "window: iterations " << lo << ".." << hi << "\n";
  const auto means = window_means(records, lo, hi);
  std::map<std::string, std::vector<double>> groups;
  for (const auto& r : records)
    if (r.iteration >= lo && r.iteration <= hi)
      groups[to_string(r.algorithm)].push_back(r.steps_survived);

  for (const auto& [name, mean] : means)
    std::cout << "  " << name << ": mean " << std::fixed << std::setprecision(2)
              << mean << " (n=" << groups[name].size() << ")\n";

  if (groups.size() >= 2) {
    std::vector<std::vector<double>> gs;
    for (const auto& [name, v] : groups) gs.push_back(v);
    const auto anova = one_way_anova(gs);
    std::cout << "one-way ANOVA: F = " << std::setprecision(3) << anova.f
              << ", p = " << std::setprecision(4) << anova.p;
    if (anova.degenerate) std::cout << " (degenerate: zero within-group variance)";
    std::cout << "\n";
    std::cout << "bootstrap contrasts (window means, 10000 resamples):\n";
    for (const auto& c : bootstrap_contrasts(records, lo, hi))
      std::cout << "  " << c.a << " - " << c.b << ": " << std::setprecision(3)
                << c.estimate << "  CI [" << c.ci_lo << ", " << c.ci_hi
                << "]  p = " << std::setprecision(4) << c.p << "\n";
  }
  return 0;
}

int cmd_plot(const std::string& records_path, const std::string& out_path) {
  std::ifstream in(records_path);
  if (!in) throw std::runtime_error("cannot open records: " + records_path);
  const auto records = parse_records_csv(in);
  if (records.empty()) throw std::runtime_error("no records found");
  const auto curves = learning_curves(records);

  std::ofstream svg(out_path);
  if (!svg) throw std::runtime_error("cannot write " + out_path);
  std::string table;
  emit_learning_curves(curves, svg, &table);

  fs::path table_path(out_path);
  table_path.replace_extension(".csv");
  std::ofstream tf(table_path);
  tf << table;
  std::cout << "wrote " << out_path << " and " << table_path.string() << "\n";
  return 0;
}

int cmd_replay(const std::string& state_path, std::uint64_t seed, int steps) {
  std::ifstream in(state_path);
  if (!in) throw std::runtime_error("cannot open state file: " + state_path);
  const LoadedState st = load_agent_state(in);
  auto agent = restore_agent(st, &st.grid, derive_seed(seed, {0xA6E7}));

  Rng env_rng(derive_seed(seed, {0xE14}));
  Rng init_rng(derive_seed(seed, {0xC0}));
  EnvState state;
  do {
    state.position = static_cast<int>(init_rng.uniform_index(st.grid.cells()));
  } while (state.position == st.grid.hill);
  state.context = static_cast<int>(init_rng.uniform_index(st.grid.n_contexts));
  agent->reset_for_iteration(state.position);

  std::cout << "t,x,y,action,resource_obs,context_obs,food_t,water_t,sleep_t\n";
  Observation obs = observe(state, st.grid);
  for (int k = 1; k <= steps; ++k) {
    const Action a = agent->act(obs);
    const StepResult sr = step(state, a, st.grid, env_rng);
    obs = sr.obs;
    std::cout << k << ',' << st.grid.x_of(state.position) << ','
              << st.grid.y_of(state.position) << ',' << to_string(a) << ','
              << to_string(obs.resource) << ','
              << context_name(obs.context_obs, st.grid.n_contexts) << ','
              << state.clocks.food << ',' << state.clocks.water << ','
              << state.clocks.sleep << '\n';
    if (sr.outcome == StepOutcome::dead) {
      std::cout << "dead," << death_cause_string(sr.violated) << '\n';
      break;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seasonal-foraging belief-planning toolkit"};
  app.require_subcommand(1);

  std::string config_path, profile, out_dir = "out", records_path, window,
              plot_out = "curves.svg", state_path;
  std::uint64_t seed = 0;
  bool trace = false;
  int replay_steps = 100;

  auto* run = app.add_subcommand("run", "run an experiment");
  run->add_option("--config", config_path, "config file (key = value)");
  run->add_option("--profile", profile, "desk or paper preset")
      ->check(CLI::IsMember({"desk", "paper"}));
  run->add_option("--out", out_dir, "output directory");
  auto* seed_opt = run->add_option("--seed", seed, "master seed");
  run->add_flag("--trace", trace, "write per-node planner trace (slow)");

  auto* stats = app.add_subcommand("stats", "summarize a records CSV");
  stats->add_option("--records", records_path, "records.csv path")->required();
  stats->add_option("--window", window, "iteration window a..b");

  auto* plot = app.add_subcommand("plot", "render learning curves as SVG");
  plot->add_option("--records", records_path, "records.csv path")->required();
  plot->add_option("--out", plot_out, "output .svg path");

  auto* replay = app.add_subcommand("replay", "replay one iteration from a state file");
  replay->add_option("--state", state_path, "agent state file")->required();
  replay->add_option("--seed", seed, "replay seed");
  replay->add_option("--steps", replay_steps, "max steps");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config_path, profile, out_dir, seed, seed_opt->count() > 0,
                     trace);
    if (stats->parsed()) return cmd_stats(records_path, window);
    if (plot->parsed()) return cmd_plot(records_path, plot_out);
    if (replay->parsed()) return cmd_replay(state_path, seed, replay_steps);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
