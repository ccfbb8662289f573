#include <gtest/gtest.h>

#include <array>
#include <set>

#include "forage/env.hpp"
#include "forage/rng.hpp"

using namespace forage;

TEST(PositionTransition, InteriorMove) {
  const GridWorld g = GridWorld::standard(10, 10);
  // row 0 is the top; up decreases y
  EXPECT_EQ(position_transition(g.cell_of(5, 5), Action::up, g), g.cell_of(5, 4));
  EXPECT_EQ(position_transition(g.cell_of(5, 5), Action::down, g), g.cell_of(5, 6));
  EXPECT_EQ(position_transition(g.cell_of(5, 5), Action::left, g), g.cell_of(4, 5));
  EXPECT_EQ(position_transition(g.cell_of(5, 5), Action::right, g), g.cell_of(6, 5));
}

TEST(PositionTransition, BorderClamps) {
  const GridWorld g = GridWorld::standard(10, 10);
  EXPECT_EQ(position_transition(g.cell_of(0, 3), Action::left, g), g.cell_of(0, 3));
  EXPECT_EQ(position_transition(g.cell_of(9, 0), Action::up, g), g.cell_of(9, 0));
}

TEST(PositionTransition, StayIsIdentity) {
  const GridWorld g = GridWorld::standard(7, 4);
  for (int c = 0; c < g.cells(); ++c)
    EXPECT_EQ(position_transition(c, Action::stay, g), c);
}

// Every composition of moves stays in bounds. Checking all (cell, depth)
// transitions of the reachability DAG covers every length-10 action string:
// the position after a prefix depends only on the current cell.
TEST(PositionTransition, CompositionStaysInBounds) {
  const GridWorld g = GridWorld::standard(5, 5);
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> stack;
  for (int c = 0; c < g.cells(); ++c) stack.push_back({c, 0});
  while (!stack.empty()) {
    const auto [cell, depth] = stack.back();
    stack.pop_back();
    ASSERT_GE(cell, 0);
    ASSERT_LT(cell, g.cells());
    if (depth == 10 || !seen.insert({cell, depth}).second) continue;
    for (auto a : kAllActions) stack.push_back({position_transition(cell, a, g), depth + 1});
  }
}

TEST(ContextTransition, EmpiricalStayFrequency) {
  const GridWorld g = GridWorld::standard(10, 10);
  Rng rng(2024);
  int stays = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const int ctx = static_cast<int>(rng.uniform_index(4));
    const int next = context_transition_sample(ctx, g, rng);
    if (next == ctx) ++stays;
    // support is {self, cyclic successor}
    EXPECT_TRUE(next == ctx || next == (ctx + 1) % 4);
  }
  EXPECT_NEAR(static_cast<double>(stays) / n, 0.95, 0.01);
}

TEST(ContextTransition, SeededDeterminism) {
  const GridWorld g = GridWorld::standard(10, 10);
  Rng a(7), b(7);
  for (int i = 0; i < 1000; ++i)
    EXPECT_EQ(context_transition_sample(i % 4, g, a),
              context_transition_sample(i % 4, g, b));
}

TEST(ContextTransition, StationaryDistributionUniform) {
  const GridWorld g = GridWorld::standard(10, 10);
  Rng rng(5);
  std::array<long, 4> counts{};
  int ctx = 0;
  const long n = 1000000;
  for (long i = 0; i < n; ++i) {
    ctx = context_transition_sample(ctx, g, rng);
    ++counts[ctx];
  }
  for (int k = 0; k < 4; ++k)
    EXPECT_NEAR(static_cast<double>(counts[k]) / n, 0.25, 0.02);
}

TEST(Observe, HillRevealsContext) {
  GridWorld g = GridWorld::standard(10, 10);
  EnvState s;
  s.position = g.hill;
  s.context = 3;  // winter
  const auto o = observe(s, g);
  EXPECT_EQ(o.context_obs, 3);
}

TEST(Observe, OffHillGivesNoContext) {
  GridWorld g = GridWorld::standard(10, 10);
  EnvState s;
  s.position = 0;
  s.context = 2;
  EXPECT_EQ(observe(s, g).context_obs, g.n_contexts);
}

TEST(Observe, LayoutLookup) {
  GridWorld g = GridWorld::standard(10, 10);
  g.layout[1][7] = static_cast<std::uint8_t>(ResourceObs::food);
  EnvState s;
  s.position = 7;
  s.context = 1;
  EXPECT_EQ(observe(s, g).resource, ResourceObs::food);
  s.context = 0;
  EXPECT_EQ(observe(s, g).resource, ResourceObs::empty);
}

TEST(Step, DeathAtFoodLimit) {
  GridWorld g = GridWorld::standard(10, 10);  // empty layout: no food anywhere
  EnvState s;
  s.position = 0;
  s.clocks = {19, 0, 0};
  Rng rng(1);
  const auto r = step(s, Action::right, g, rng);
  EXPECT_EQ(r.outcome, StepOutcome::dead);
  EXPECT_TRUE(r.violated[0]);
  EXPECT_FALSE(r.violated[1]);
  EXPECT_EQ(s.clocks.food, 20);
  EXPECT_THROW(step(s, Action::stay, g, rng), std::logic_error);
}

TEST(Step, ResetAndIncrement) {
  GridWorld g = GridWorld::standard(10, 10);
  for (int ctx = 0; ctx < 4; ++ctx)
    g.layout[ctx][g.cell_of(1, 0)] = static_cast<std::uint8_t>(ResourceObs::water);
  EnvState s;
  s.position = g.cell_of(0, 0);
  s.clocks = {3, 7, 2};
  Rng rng(1);
  const auto r = step(s, Action::right, g, rng);
  EXPECT_EQ(r.obs.resource, ResourceObs::water);
  EXPECT_EQ(s.clocks.food, 4);
  EXPECT_EQ(s.clocks.water, 0);
  EXPECT_EQ(s.clocks.sleep, 3);
  EXPECT_EQ(r.outcome, StepOutcome::alive);
}

// A scripted loop that touches every resource stays alive under generous
// limits.
TEST(Step, ScriptedRotationSurvives) {
  GridWorld g = GridWorld::standard(3, 1, 4);
  g.limits = {6, 6, 6};
  for (int ctx = 0; ctx < 4; ++ctx) {
    g.layout[ctx][0] = static_cast<std::uint8_t>(ResourceObs::food);
    g.layout[ctx][1] = static_cast<std::uint8_t>(ResourceObs::water);
    g.layout[ctx][2] = static_cast<std::uint8_t>(ResourceObs::sleep);
  }
  EnvState s;
  s.position = 0;
  Rng rng(9);
  const Action script[4] = {Action::right, Action::right, Action::left, Action::left};
  for (int i = 0; i < 100; ++i) {
    const auto r = step(s, script[i % 4], g, rng);
    ASSERT_EQ(r.outcome, StepOutcome::alive) << "died at step " << i;
  }
}

// Exactly one clock resets per step, and only on a resource cell of the
// active season.
TEST(Step, ExactlyOneClockResetsOnResource) {
  GridWorld g = GridWorld::standard(6, 6, 4);
  generate_layout(99, 2, g);
  g.limits = {1000, 1000, 1000};
  EnvState s;
  s.position = 0;
  Rng rng(4);
  Rng actions(5);
  for (int i = 0; i < 500; ++i) {
    const ResourceClocks before = s.clocks;
    const auto act = static_cast<Action>(actions.uniform_index(kNumActions));
    const auto r = step(s, act, g, rng);
    int resets = 0;
    for (int j = 0; j < kNumResources; ++j)
      if (s.clocks[j] == 0) ++resets;
    if (r.obs.resource == ResourceObs::empty) {
      EXPECT_EQ(resets, 0);
      for (int j = 0; j < kNumResources; ++j) EXPECT_EQ(s.clocks[j], before[j] + 1);
    } else {
      EXPECT_EQ(resets, 1);
      EXPECT_EQ(g.resource_at(s.context, s.position), r.obs.resource);
    }
  }
}

TEST(GenerateLayout, CountsAndDeterminism) {
  GridWorld a = GridWorld::standard(10, 10);
  GridWorld b = GridWorld::standard(10, 10);
  generate_layout(77, 1, a);
  generate_layout(77, 1, b);
  EXPECT_EQ(a.layout, b.layout);
  int assignments = 0;
  for (int ctx = 0; ctx < 4; ++ctx) {
    std::array<int, kNumResources> per_resource{};
    for (int cell = 0; cell < a.cells(); ++cell)
      if (a.layout[ctx][cell] != 0) {
        ++assignments;
        ++per_resource[a.layout[ctx][cell] - 1];
      }
    for (int r = 0; r < kNumResources; ++r) EXPECT_EQ(per_resource[r], 1);
  }
  EXPECT_EQ(assignments, 12);
}

TEST(GenerateLayout, HillNeverAssigned) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    GridWorld g = GridWorld::standard(10, 10);
    generate_layout(seed, 1, g);
    for (int ctx = 0; ctx < 4; ++ctx)
      ASSERT_EQ(g.layout[ctx][g.hill], 0) << "seed " << seed;
  }
}

TEST(GenerateLayout, InsufficientCellsRejected) {
  GridWorld g = GridWorld::standard(2, 1, 2);
  EXPECT_THROW(generate_layout(1, 1, g), std::invalid_argument);
}

TEST(Layout, CsvExport) {
  GridWorld g = GridWorld::standard(4, 4, 4);
  g.layout[2][g.cell_of(1, 3)] = static_cast<std::uint8_t>(ResourceObs::sleep);
  std::string csv;
  append_layout_csv(g, 5, csv);
  EXPECT_EQ(csv, "5,autumn,1,3,sleep\n");
}
