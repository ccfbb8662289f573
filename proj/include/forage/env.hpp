#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "forage/belief.hpp"
#include "forage/rng.hpp"

namespace forage {

// Fixed action order; plan() breaks value ties by this order.
enum class Action : std::uint8_t { up = 0, down, left, right, stay };
inline constexpr int kNumActions = 5;
inline constexpr std::array<Action, 5> kAllActions = {
    Action::up, Action::down, Action::left, Action::right, Action::stay};

enum class ResourceObs : std::uint8_t { empty = 0, food, water, sleep };
inline constexpr int kNumResourceObs = 4;
inline constexpr int kNumResources = 3;

inline const char* to_string(Action a) {
  switch (a) {
    case Action::up: return "up";
    case Action::down: return "down";
    case Action::left: return "left";
    case Action::right: return "right";
    case Action::stay: return "stay";
  }
  return "?";
}

inline const char* to_string(ResourceObs o) {
  switch (o) {
    case ResourceObs::empty: return "empty";
    case ResourceObs::food: return "food";
    case ResourceObs::water: return "water";
    case ResourceObs::sleep: return "sleep";
  }
  return "?";
}

/// Season names follow the cyclic order of the context chain.
inline std::string context_name(int ctx, int n_contexts) {
  static const char* kFour[] = {"summer", "spring", "autumn", "winter"};
  if (n_contexts == 4 && ctx >= 0 && ctx < 4) return kFour[ctx];
  return "ctx" + std::to_string(ctx);
}

/// Two observation modalities. context_obs == n_contexts means "no context"
/// (every cell except the hill).
struct Observation {
  ResourceObs resource = ResourceObs::empty;
  int context_obs = 0;
};

/// Time-steps since each resource was last consumed. Advancing increments all
/// clocks, then resets the one matching the observed resource.
struct ResourceClocks {
  int food = 0;
  int water = 0;
  int sleep = 0;

  int operator[](int r) const { return r == 0 ? food : (r == 1 ? water : sleep); }
  int& operator[](int r) { return r == 0 ? food : (r == 1 ? water : sleep); }

  ResourceClocks advanced(ResourceObs obs) const {
    ResourceClocks c{food + 1, water + 1, sleep + 1};
    if (obs != ResourceObs::empty) c[static_cast<int>(obs) - 1] = 0;
    return c;
  }

  bool operator==(const ResourceClocks&) const = default;
};

/// Ground-truth world description: geometry, per-context resource layouts,
/// context chain and survival limits.
///
/// Axis convention: row-major cells, origin at the top-left, `up` decreases
/// the row index. cell = y * width + x.
struct GridWorld {
  int width = 10;
  int height = 10;
  int n_contexts = 4;
  int hill = 0;  // always the middle cell: (width/2, height/2)
  // layout[ctx][cell]: 0 = nothing, otherwise the ResourceObs value.
  std::vector<std::vector<std::uint8_t>> layout;
  StochasticMatrix context_matrix;
  std::array<int, kNumResources> limits = {20, 22, 25};

  int cells() const { return width * height; }
  int cell_of(int x, int y) const { return y * width + x; }
  int x_of(int cell) const { return cell % width; }
  int y_of(int cell) const { return cell / width; }

  ResourceObs resource_at(int ctx, int cell) const {
    return static_cast<ResourceObs>(layout[ctx][cell]);
  }

  /// Blank world with the default seasonal chain (stay 0.95, cyclic advance
  /// 0.05) and the hill in the middle. Layouts start empty.
  static GridWorld standard(int width, int height, int n_contexts = 4,
                            double stay_prob = 0.95) {
    if (width < 1 || height < 1 || n_contexts < 1)
      throw std::invalid_argument("GridWorld: bad dimensions");
    GridWorld g;
    g.width = width;
    g.height = height;
    g.n_contexts = n_contexts;
    g.hill = g.cell_of(width / 2, height / 2);
    g.layout.assign(n_contexts, std::vector<std::uint8_t>(g.cells(), 0));
    g.context_matrix.n = n_contexts;
    g.context_matrix.m.assign(n_contexts * n_contexts, 0.0);
    for (int c = 0; c < n_contexts; ++c) {
      const int succ = (c + 1) % n_contexts;
      g.context_matrix.m[c * n_contexts + c] = stay_prob;
      g.context_matrix.m[succ * n_contexts + c] += 1.0 - stay_prob;
    }
    return g;
  }
};

/// Deterministic move with border clamping; `stay` is the identity.
inline int position_transition(int cell, Action action, const GridWorld& g) {
  int x = g.x_of(cell), y = g.y_of(cell);
  switch (action) {
    case Action::up: y = y > 0 ? y - 1 : y; break;
    case Action::down: y = y < g.height - 1 ? y + 1 : y; break;
    case Action::left: x = x > 0 ? x - 1 : x; break;
    case Action::right: x = x < g.width - 1 ? x + 1 : x; break;
    case Action::stay: break;
  }
  return g.cell_of(x, y);
}

inline int context_transition_sample(int ctx, const GridWorld& g, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (int next = 0; next < g.n_contexts; ++next) {
    acc += g.context_matrix.at(next, ctx);
    if (u < acc) return next;
  }
  return g.n_contexts - 1;
}

struct EnvState {
  int position = 0;
  int context = 0;
  ResourceClocks clocks;
  int t = 0;
  bool dead = false;
};

inline Observation observe(const EnvState& s, const GridWorld& g) {
  Observation o;
  o.resource = g.resource_at(s.context, s.position);
  o.context_obs = (s.position == g.hill) ? s.context : g.n_contexts;
  return o;
}

enum class StepOutcome { alive, dead };

struct StepResult {
  Observation obs;
  StepOutcome outcome = StepOutcome::alive;
  std::array<bool, kNumResources> violated = {false, false, false};
};

/// Advances the world one step: deterministic move, sampled context change,
/// clock update from the observation at the new position, death when any
/// clock reaches its limit.
inline StepResult step(EnvState& s, Action action, const GridWorld& g, Rng& rng) {
  if (s.dead) throw std::logic_error("step: trial already dead");
  s.position = position_transition(s.position, action, g);
  s.context = context_transition_sample(s.context, g, rng);
  StepResult r;
  r.obs = observe(s, g);
  s.clocks = s.clocks.advanced(r.obs.resource);
  for (int i = 0; i < kNumResources; ++i) {
    if (s.clocks[i] >= g.limits[i]) {
      r.violated[i] = true;
      r.outcome = StepOutcome::dead;
    }
  }
  s.t += 1;
  s.dead = (r.outcome == StepOutcome::dead);
  return r;
}

/// Seeded placement of k disjoint cells per resource per context, never on
/// the hill. Deterministic given the seed.
inline void generate_layout(std::uint64_t seed, int k, GridWorld& g) {
  if (k < 1) throw std::invalid_argument("generate_layout: k must be >= 1");
  const int needed = k * kNumResources;
  if (needed > g.cells() - 1)
    throw std::invalid_argument("generate_layout: not enough free cells");
  Rng rng(seed);
  std::vector<int> free_cells;
  free_cells.reserve(g.cells() - 1);
  for (int c = 0; c < g.cells(); ++c)
    if (c != g.hill) free_cells.push_back(c);

  g.layout.assign(g.n_contexts, std::vector<std::uint8_t>(g.cells(), 0));
  std::vector<int> pool;
  for (int ctx = 0; ctx < g.n_contexts; ++ctx) {
    pool = free_cells;
    // partial Fisher-Yates: draw `needed` distinct cells
    for (int i = 0; i < needed; ++i) {
      const std::size_t j = i + rng.uniform_index(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    for (int r = 0; r < kNumResources; ++r)
      for (int i = 0; i < k; ++i)
        g.layout[ctx][pool[r * k + i]] = static_cast<std::uint8_t>(r + 1);
  }
}

/// Writes layouts as CSV rows (episode column supplied by the caller):
/// context,x,y,resource
inline void append_layout_csv(const GridWorld& g, int episode, std::string& out) {
  for (int ctx = 0; ctx < g.n_contexts; ++ctx)
    for (int cell = 0; cell < g.cells(); ++cell)
      if (g.layout[ctx][cell] != 0) {
        out += std::to_string(episode);
        out += ',';
        out += context_name(ctx, g.n_contexts);
        out += ',';
        out += std::to_string(g.x_of(cell));
        out += ',';
        out += std::to_string(g.y_of(cell));
        out += ',';
        out += to_string(static_cast<ResourceObs>(g.layout[ctx][cell]));
        out += '\n';
      }
}

}  // namespace forage
