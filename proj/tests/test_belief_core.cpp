#include <gtest/gtest.h>

#include <cmath>

#include "forage/belief.hpp"
#include "forage/categorical.hpp"
#include "forage/dirichlet.hpp"
#include "forage/models.hpp"
#include "forage/rng.hpp"
#include "oracles.hpp"

using namespace forage;

namespace {

Categorical random_categorical(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (auto& x : w) x = 0.05 + rng.uniform();
  return Categorical::from_weights(std::move(w));
}

}  // namespace

// --- Categorical ---

TEST(Categorical, ConstructionValidates) {
  EXPECT_NO_THROW(Categorical({0.5, 0.5}));
  EXPECT_THROW(Categorical({0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(Categorical({1.5, -0.5}), std::invalid_argument);
  EXPECT_THROW(Categorical(std::vector<double>{}), std::invalid_argument);
}

TEST(Categorical, FactoriesAndAccessors) {
  const auto u = Categorical::uniform(4);
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(u[i], 0.25);
  const auto d = Categorical::delta(5, 3);
  EXPECT_EQ(d.argmax(), 3u);
  EXPECT_DOUBLE_EQ(d.entropy(), 0.0);
  const auto w = Categorical::from_weights({1.0, 3.0});
  EXPECT_DOUBLE_EQ(w[0], 0.25);
  EXPECT_DOUBLE_EQ(w[1], 0.75);
  EXPECT_THROW(Categorical::from_weights({0.0, 0.0}), std::invalid_argument);
}

// --- DirichletCounts / normalize_counts ---

TEST(NormalizeCounts, SymmetricColumn) {
  DirichletCounts c(4, 1, 1.0, CountRole::likelihood);
  const auto t = normalize_counts(c);
  for (int o = 0; o < 4; ++o) EXPECT_DOUBLE_EQ(t.at(o, 0), 0.25);
}

TEST(NormalizeCounts, AnalyticRatio) {
  DirichletCounts c(2, 1, 1.0, CountRole::likelihood);
  c.add(1, 0, 2.0);  // column (1, 3)
  const auto t = normalize_counts(c);
  EXPECT_DOUBLE_EQ(t.at(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(t.at(1, 0), 0.75);
}

TEST(NormalizeCounts, RandomColumnsSumToOne) {
  Rng rng(11);
  DirichletCounts c(4, 3, 0.25, CountRole::likelihood);
  for (int o = 0; o < 4; ++o)
    for (int cell = 0; cell < 3; ++cell) c.add(o, cell, rng.uniform() * 5.0);
  const auto t = normalize_counts(c);
  for (int cell = 0; cell < 3; ++cell) {
    double sum = 0.0;
    for (int o = 0; o < 4; ++o) sum += t.at(o, cell);
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(NormalizeCounts, RejectsNonPositive) {
  DirichletCounts c(2, 1, 1.0, CountRole::likelihood);
  c.add(0, 0, -1.0);  // drive a count to zero
  EXPECT_THROW(normalize_counts(c), std::invalid_argument);
}

TEST(UpdateConcentration, DeltaBeliefHardAssignment) {
  DirichletCounts c(4, 4, 0.25, CountRole::likelihood);
  const auto updated =
      update_concentration(c, Categorical::delta(4, 3), /*observation=*/1);
  EXPECT_DOUBLE_EQ(updated.at(1, 3), 1.25);
  EXPECT_DOUBLE_EQ(updated.at(1, 2), 0.25);
  EXPECT_DOUBLE_EQ(updated.at(0, 3), 0.25);
}

TEST(UpdateConcentration, ProportionalAllocation) {
  DirichletCounts c(4, 2, 0.25, CountRole::likelihood);
  const auto updated = update_concentration(c, Categorical::uniform(2), 2);
  EXPECT_DOUBLE_EQ(updated.at(2, 0), 0.75);
  EXPECT_DOUBLE_EQ(updated.at(2, 1), 0.75);
}

TEST(UpdateConcentration, TotalRisesByExactlyOne) {
  Rng rng(42);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t cells = 1 + rng.uniform_index(6);
    DirichletCounts c(4, cells, 0.25, CountRole::likelihood);
    const double before = c.total();
    const auto updated = update_concentration(
        c, random_categorical(rng, cells), rng.uniform_index(4));
    EXPECT_NEAR(updated.total() - before, 1.0, 1e-12);
  }
}

TEST(UpdateConcentration, ObservedOutcomeProbabilityNeverDecreases) {
  Rng rng(43);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t cells = 1 + rng.uniform_index(5);
    DirichletCounts c(4, cells, 0.1 + rng.uniform(), CountRole::likelihood);
    for (std::size_t cell = 0; cell < cells; ++cell)
      for (int o = 0; o < 4; ++o) c.add(o, cell, rng.uniform() * 3.0);
    const auto belief = random_categorical(rng, cells);
    const std::size_t obs = rng.uniform_index(4);
    auto p_of = [&](const DirichletCounts& d) {
      double p = 0.0;
      for (std::size_t cell = 0; cell < cells; ++cell)
        p += belief[cell] * d.normalized(obs, cell);
      return p;
    };
    const double before = p_of(c);
    const auto updated = update_concentration(c, belief, obs);
    EXPECT_GE(p_of(updated) - before, -1e-12);
  }
}

// Repeated soft updates under a fixed true model pull the normalized counts
// toward the true likelihood column.
TEST(UpdateConcentration, ConvergesTowardTrueModel) {
  Rng rng(7);
  const std::vector<double> truth = {0.6, 0.1, 0.1, 0.2};
  DirichletCounts c(4, 1, 0.25, CountRole::likelihood);
  const auto belief = Categorical::delta(1, 0);
  auto kl_to_truth = [&](const DirichletCounts& d) {
    double kl = 0.0;
    for (int o = 0; o < 4; ++o)
      kl += truth[o] * std::log(truth[o] / d.normalized(o, 0));
    return kl;
  };
  const double kl_start = kl_to_truth(c);
  for (int step = 0; step < 100; ++step)
    update_concentration_inplace(c, belief, rng.sample_weights(truth));
  EXPECT_LT(kl_to_truth(c), kl_start);
  EXPECT_LT(kl_to_truth(c), 0.05);
}

// --- factored conditioning vs joint enumeration ---

TEST(BayesUpdate, AgreesWithJointEnumeration) {
  Rng rng(99);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t np = 1 + rng.uniform_index(5);
    const std::size_t nc = 1 + rng.uniform_index(4);
    if (np * nc > 20) continue;
    const BeliefState pred{random_categorical(rng, np), random_categorical(rng, nc)};
    std::vector<double> lik(np * nc);
    for (auto& x : lik) x = rng.uniform();

    const auto got = condition_factored(
        pred, [&](std::size_t p, std::size_t k) { return lik[p * nc + k]; });
    ASSERT_FALSE(got.degenerate);

    // enumerate the joint and marginalize
    std::vector<double> joint_prior(np * nc), joint_lik(np * nc);
    for (std::size_t p = 0; p < np; ++p)
      for (std::size_t k = 0; k < nc; ++k) {
        joint_prior[p * nc + k] = pred.position[p] * pred.context[k];
        joint_lik[p * nc + k] = lik[p * nc + k];
      }
    const auto joint_post = oracle::enum_posterior(joint_prior, joint_lik);
    for (std::size_t p = 0; p < np; ++p) {
      double want = 0.0;
      for (std::size_t k = 0; k < nc; ++k) want += joint_post[p * nc + k];
      EXPECT_NEAR(got.belief.position[p], want, 1e-9);
    }
    for (std::size_t k = 0; k < nc; ++k) {
      double want = 0.0;
      for (std::size_t p = 0; p < np; ++p) want += joint_post[p * nc + k];
      EXPECT_NEAR(got.belief.context[k], want, 1e-9);
    }
  }
}

TEST(BayesUpdate, TwoStateToyByHand) {
  // prior (0.5, 0.5), transition swaps the states, likelihood column
  // (0.9, 0.2) for the observed outcome
  const Categorical prior({0.5, 0.5});
  const StochasticMatrix swap(2, {0.0, 1.0, 1.0, 0.0});
  const Categorical pred = propagate(prior, swap);
  const BeliefState b{Categorical::delta(1, 0), pred};
  const auto got = condition_factored(
      b, [&](std::size_t, std::size_t k) { return k == 0 ? 0.9 : 0.2; });
  const auto want = oracle::enum_posterior({0.5, 0.5}, {0.9, 0.2});
  EXPECT_NEAR(got.belief.context[0], want[0], 1e-12);
  EXPECT_NEAR(got.belief.context[1], want[1], 1e-12);
  EXPECT_NEAR(got.belief.context[0], 9.0 / 11.0, 1e-12);
}

TEST(BayesUpdate, IdentityLikelihoodKeepsDelta) {
  GridWorld g = GridWorld::standard(3, 3, 4);
  // no resources anywhere: observation (empty, no-context) is certain
  WorldModel m;
  m.grid = &g;
  m.likelihood = ResourceLikelihood::known(g);
  m.transition = ContextTransition::known(&g.context_matrix);
  const BeliefState prior{Categorical::delta(9, 0), Categorical::delta(4, 2)};
  const Observation obs{ResourceObs::empty, 4};
  const auto got = bayes_update(prior, Action::stay, obs, m);
  EXPECT_FALSE(got.degenerate);
  EXPECT_DOUBLE_EQ(got.belief.position[0], 1.0);
}

TEST(BayesUpdate, UniformLikelihoodReturnsPredictive) {
  GridWorld g = GridWorld::standard(3, 3, 4);
  DirichletCounts counts(4, 9 * 4, 0.25, CountRole::likelihood);  // flat
  WorldModel m;
  m.grid = &g;
  m.likelihood = ResourceLikelihood::learned(&counts, 4);
  m.transition = ContextTransition::known(&g.context_matrix);
  const BeliefState prior{Categorical::delta(9, 1), Categorical::uniform(4)};
  const auto pred = predict_belief(prior, Action::down, m);
  const auto got = bayes_update(prior, Action::down,
                                Observation{ResourceObs::food, 4}, m);
  ASSERT_FALSE(got.degenerate);
  for (int k = 0; k < 4; ++k)
    EXPECT_NEAR(got.belief.context[k], pred.context[k], 1e-12);
}

TEST(BayesUpdate, DegenerateEvidenceFallsBackToPredictive) {
  GridWorld g = GridWorld::standard(3, 3, 4);
  g.layout[0][0] = static_cast<std::uint8_t>(ResourceObs::food);
  WorldModel m;
  m.grid = &g;
  m.likelihood = ResourceLikelihood::known(g);
  m.transition = ContextTransition::known(&g.context_matrix);
  // agent knows it is at cell 8; cell 8 is empty in every context, so seeing
  // food there is impossible
  const BeliefState prior{Categorical::delta(9, 8), Categorical::uniform(4)};
  const auto got = bayes_update(prior, Action::stay,
                                Observation{ResourceObs::food, 4}, m);
  EXPECT_TRUE(got.degenerate);
  const auto pred = predict_belief(prior, Action::stay, m);
  for (int k = 0; k < 4; ++k)
    EXPECT_DOUBLE_EQ(got.belief.context[k], pred.context[k]);
}

// --- backwards smoothing ---

TEST(BackwardsSmoothing, EmptyWindowReturnsStored) {
  const Categorical filtered({0.3, 0.7});
  const auto got = smooth_with_future(filtered, {});
  EXPECT_DOUBLE_EQ(got[0], 0.3);
  EXPECT_DOUBLE_EQ(got[1], 0.7);
}

TEST(BackwardsSmoothing, UniformFutureLikelihoodsChangeNothing) {
  const Categorical filtered({0.3, 0.7});
  const StochasticMatrix t(2, {0.8, 0.4, 0.2, 0.6});
  std::vector<SmoothingStep> steps;
  steps.push_back({&t, {0.5, 0.5}});
  steps.push_back({&t, {1.0, 1.0}});
  const auto got = smooth_with_future(filtered, steps);
  EXPECT_NEAR(got[0], 0.3, 1e-12);
  EXPECT_NEAR(got[1], 0.7, 1e-12);
}

TEST(BackwardsSmoothing, ThreeStepHmmMatchesForwardBackward) {
  oracle::Hmm hmm;
  hmm.prior = {0.5, 0.5};
  StochasticMatrix t(2, {0.9, 0.3, 0.1, 0.7});
  hmm.transitions = {t, t};
  hmm.likelihoods = {{0.8, 0.2}, {0.1, 0.9}, {0.6, 0.4}};
  const auto fb = oracle::forward_backward(hmm);

  for (std::size_t tau = 0; tau < 3; ++tau) {
    std::vector<SmoothingStep> steps;
    for (std::size_t j = tau + 1; j < 3; ++j)
      steps.push_back({&hmm.transitions[j - 1], hmm.likelihoods[j]});
    const auto got =
        smooth_with_future(Categorical(fb.filtered[tau]), steps);
    for (int s = 0; s < 2; ++s)
      EXPECT_NEAR(got[s], fb.smoothed[tau][s], 1e-9) << "tau=" << tau;
  }
}

TEST(BackwardsSmoothing, RandomHmmsMatchForwardBackward) {
  Rng rng(1234);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rng.uniform_index(9);   // up to 10 states
    const std::size_t t_max = 1 + rng.uniform_index(5);  // up to 6 steps
    oracle::Hmm hmm;
    hmm.prior = random_categorical(rng, n).probs();
    StochasticMatrix trans;
    trans.n = n;
    trans.m.resize(n * n);
    for (std::size_t prev = 0; prev < n; ++prev) {
      const auto col = random_categorical(rng, n);
      for (std::size_t next = 0; next < n; ++next)
        trans.m[next * n + prev] = col[next];
    }
    for (std::size_t j = 0; j < t_max; ++j) hmm.transitions.push_back(trans);
    for (std::size_t j = 0; j <= t_max; ++j) {
      std::vector<double> lik(n);
      for (auto& x : lik) x = 0.05 + rng.uniform();
      hmm.likelihoods.push_back(lik);
    }
    const auto fb = oracle::forward_backward(hmm);
    for (std::size_t tau = 0; tau <= t_max; ++tau) {
      std::vector<SmoothingStep> steps;
      for (std::size_t j = tau + 1; j <= t_max; ++j)
        steps.push_back({&hmm.transitions[j - 1], hmm.likelihoods[j]});
      const auto got = smooth_with_future(Categorical(fb.filtered[tau]), steps);
      for (std::size_t s = 0; s < n; ++s)
        EXPECT_NEAR(got[s], fb.smoothed[tau][s], 1e-9);
    }
  }
}

