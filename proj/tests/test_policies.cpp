#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace aoisat;
using namespace aoisat::testing;

namespace {

// Two single-cell sensors and a satellite on a 1x2 grid.
struct Fixture {
  std::vector<NodeSpec> nodes{NodeSpec::iot("a", 0, 1, 0.9), NodeSpec::iot("b", 1, 2, 0.5),
                              NodeSpec::satellite("s", 3, 0.25)};
  std::vector<double> weights{1.0, 1.0};
  std::vector<std::int64_t> ages{4, 7};
  std::vector<CellId> cell_a{0}, cell_b{1}, both{0, 1};
  std::vector<std::span<const CellId>> refresh{cell_a, cell_b, both};

  std::vector<std::span<const CellId>> ground_only{cell_a, cell_b, {}};

  SelectionContext ctx(bool sat_available) {
    return {ages, weights, nodes, sat_available ? refresh : ground_only, sat_available, NodeIndex{2}};
  }
};

}  // namespace

TEST(Randomized, EffectiveDistributionPerBehaviour) {
  RandomizedPolicy sr{{0.25, 0.25, 0.5}};
  EXPECT_EQ(sr.effective(true, 2), (std::vector<double>{0.25, 0.25, 0.5}));
  EXPECT_EQ(sr.effective(false, 2), (std::vector<double>{0.5, 0.5, 0.0}));
  sr.unavailable = UnavailableBehavior::idle;
  EXPECT_EQ(sr.effective(false, 2), (std::vector<double>{0.25, 0.25, 0.0}));
  sr.u_period = std::vector<double>{0.9, 0.1, 0.0};
  EXPECT_EQ(sr.effective(false, 2), (std::vector<double>{0.9, 0.1, 0.0}));
}

TEST(Randomized, SamplingFrequencies) {
  Fixture fx;
  Policy sr = RandomizedPolicy{{0.2, 0.3, 0.4}};  // 0.1 idle
  Rng rng(11, Stream::policy);
  const int n = 400000;
  for (bool avail : {true, false}) {
    auto ctx = fx.ctx(avail);
    std::vector<int> counts(4, 0);
    for (int i = 0; i < n; ++i) {
      const auto k = select(sr, ctx, rng);
      ++counts[k ? static_cast<std::size_t>(*k) : 3];
    }
    // Renormalizing keeps the idle share and spreads the satellite mass.
    const std::vector<double> expected =
        avail ? std::vector<double>{0.2, 0.3, 0.4, 0.1} : std::vector<double>{0.2 + 0.4 * 0.4, 0.3 + 0.4 * 0.6, 0.0, 0.1};
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(counts[k] / static_cast<double>(n), expected[k], 0.004);
  }
}

TEST(Randomized, ValidationRejectsBadDistributions) {
  const auto s = satellite_scenario();
  EXPECT_THROW(validate(RandomizedPolicy{std::vector<double>(8, 0.2)}, s), ConfigError);
  EXPECT_THROW(validate(RandomizedPolicy{std::vector<double>(3, 0.2)}, s), ConfigError);
  RandomizedPolicy bad_u{half_satellite_policy().access, std::vector<double>(8, 0.1)};
  EXPECT_THROW(validate(bad_u, s), ConfigError);
  EXPECT_NO_THROW(validate(half_satellite_policy(), s));
}

TEST(Greedy, PicksLargestWeightedAgeReduction) {
  Fixture fx;
  EXPECT_EQ(greedy_select(fx.ctx(true)), NodeIndex{2});
  EXPECT_EQ(greedy_select(fx.ctx(false)), NodeIndex{1});
  fx.ages = {7, 7};
  EXPECT_EQ(greedy_select(fx.ctx(false)), NodeIndex{0});  // tie goes to the lower id
}

TEST(Mwl1, ScalesBySquareRootOfReliability) {
  Fixture fx;
  fx.ages = {6, 10};
  // greedy: 6 vs 10 -> b; MWL1: sqrt(.9)*6 = 5.69 vs sqrt(.5)*10 = 7.07 -> b.
  EXPECT_EQ(mwl1_select(fx.ctx(false)), NodeIndex{1});
  fx.ages = {8, 10};
  EXPECT_EQ(greedy_select(fx.ctx(false)), NodeIndex{1});
  EXPECT_EQ(mwl1_select(fx.ctx(false)), NodeIndex{0});  // 7.59 vs 7.07
  // satellite: sqrt(.25)*18 = 9 beats both
  EXPECT_EQ(mwl1_select(fx.ctx(true)), NodeIndex{2});
}

TEST(MaxWeight, ScoreMatchesHandComputation) {
  Fixture fx;
  fx.ages = {3, 5};
  MaxWeightState mw({0.1, 0.2, 0.3}, 2.0);
  mw.debts = {0.4, -1.0, 0.0};
  const auto ctx = fx.ctx(true);
  // node b: l=2 p=.5 covers cell 1 (age 5)
  // beta p x+ = 0; p A(A+2-2/p) = .5*5*3 = 7.5; -2l(8-5) = -12; -(l(l+p-1)/p) * 2 = -12
  EXPECT_NEAR(max_weight_score(ctx, mw, 1), 7.5 - 12.0 - 12.0, 1e-12);
  // node a: l=1 p=.9: 2*.9*.4 = .72; .9*3*(5-2/.9) = 7.5; -2*5 = -10; -(.9/.9)*2 = -2
  EXPECT_NEAR(max_weight_score(ctx, mw, 0), 0.72 + 7.5 - 10.0 - 2.0, 1e-12);
}

TEST(MaxWeight, DebtsTrackTargetsMinusDeliveries) {
  MaxWeightState mw({0.25, 0.5}, 1.0);
  update_debts(mw, NodeIndex{0}, true);
  update_debts(mw, NodeIndex{1}, false);
  update_debts(mw, std::nullopt, false);
  EXPECT_DOUBLE_EQ(mw.debts[0], 0.75 - 1.0);
  EXPECT_DOUBLE_EQ(mw.debts[1], 1.5);
  EXPECT_EQ(mw.epoch, 3);
}

TEST(MaxWeight, IdlesOnlyWhenAllowed) {
  Fixture fx;
  fx.ages = {1, 1};
  MaxWeightState strict({0.0, 0.0, 0.0}, 1.0, false), lazy({0.0, 0.0, 0.0}, 1.0, true);
  EXPECT_TRUE(max_weight_select(fx.ctx(false), strict).has_value());
  EXPECT_FALSE(max_weight_select(fx.ctx(false), lazy).has_value());
}

TEST(Targets, ClosedFormMatchesNumericSolverOnUniqueCoverage) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> up(0.1, 1.0), uw(0.2, 5.0);
  std::uniform_int_distribution<int> ul(1, 10), un(1, 8);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = un(gen);
    std::vector<NodeSpec> nodes;
    std::vector<double> weights;
    CoverageMatrix f(n, n);
    for (int k = 0; k < n; ++k) {
      nodes.push_back(NodeSpec::iot("n" + std::to_string(k), k, ul(gen), up(gen)));
      weights.push_back(uw(gen));
      f.at(k, k) = 1.0;
    }
    const auto numeric = solve_targets_numeric(nodes, weights, f);
    // sqrt(a_k p_k / l_k) / sum_j sqrt(a_j l_j / p_j)
    double denom = 0.0;
    for (int j = 0; j < n; ++j) denom += std::sqrt(weights[j] * nodes[j].packets / nodes[j].success_prob);
    for (int k = 0; k < n; ++k) {
      const double expected = std::sqrt(weights[k] * nodes[k].success_prob / nodes[k].packets) / denom;
      EXPECT_NEAR(numeric.nu[k], expected, 1e-6) << "trial " << trial << " node " << k;
    }
    EXPECT_TRUE(solve_targets(nodes, weights, f).closed_form);
  }
}

TEST(Targets, BudgetHoldsOnOverlappingCoverage) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u01(0.0, 1.0), up(0.1, 1.0);
  std::uniform_int_distribution<int> ul(1, 8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t cells = 3 + trial % 5, n = 2 + trial % 4;
    std::vector<NodeSpec> nodes;
    CoverageMatrix f(cells, n);
    for (std::size_t k = 0; k < n; ++k) {
      nodes.push_back(NodeSpec::iot("n" + std::to_string(k), 0, ul(gen), up(gen)));
      for (std::size_t m = 0; m < cells; ++m) f.at(m, k) = u01(gen) < 0.6 ? u01(gen) : 0.0;
    }
    for (std::size_t m = 0; m < cells; ++m)
      if (f.row_sum(m) == 0.0) f.at(m, m % n) = 0.5;
    const std::vector<double> weights(cells, 1.0);
    const auto t = solve_targets(nodes, weights, f);
    EXPECT_LE(budget_usage(nodes, t.nu), 1.0 + 1e-9);
    EXPECT_NEAR(t.slack, 0.0, 1e-6);
    for (double v : t.nu) EXPECT_GE(v, 0.0);
    // No random point on the budget simplex does better.
    const double best = target_objective(weights, f, t.nu);
    for (int probe = 0; probe < 200; ++probe) {
      std::vector<double> share(n);
      double total = 0.0;
      for (auto& s : share) total += s = -std::log(1.0 - u01(gen));
      std::vector<double> nu(n);
      for (std::size_t k = 0; k < n; ++k) nu[k] = share[k] / total * nodes[k].success_prob / nodes[k].packets;
      EXPECT_LE(best, target_objective(weights, f, nu) * (1.0 + 1e-9));
    }
  }
}

TEST(Targets, TwoNodeOverlapMatchesGridSearch) {
  std::vector<NodeSpec> nodes{NodeSpec::iot("a", 0, 2, 0.8), NodeSpec::uav("u", 0, 1, 6, 0.8)};
  CoverageMatrix f(3, 2);
  f.at(0, 0) = 1.0;
  f.at(0, 1) = 0.3;
  f.at(1, 1) = 0.5;
  f.at(2, 1) = 0.2;
  const std::vector<double> weights{1.0, 2.0, 1.0};
  const auto t = solve_targets(nodes, weights, f);
  double best = 1e300, best_share = 0.0;
  for (int i = 1; i < 200000; ++i) {
    const double w = i / 200000.0;
    const std::vector<double> nu{w * 0.8 / 2.0, (1.0 - w) * 0.8 / 6.0};
    const double j = target_objective(weights, f, nu);
    if (j < best) best = j, best_share = w;
  }
  EXPECT_NEAR(t.nu[0], best_share * 0.4, 1e-5);
  EXPECT_NEAR(target_objective(weights, f, t.nu), best, 1e-9 * best);
}

TEST(Targets, UncoveredCellIsInfeasible) {
  std::vector<NodeSpec> nodes{NodeSpec::iot("a", 0, 1, 0.5)};
  CoverageMatrix f(2, 1);
  f.at(0, 0) = 1.0;
  EXPECT_THROW(solve_targets(nodes, std::vector<double>{1.0, 1.0}, f), InfeasibleError);
}

TEST(Targets, AccessProbabilitiesFollowTargets) {
  std::vector<NodeSpec> nodes{NodeSpec::iot("a", 0, 1, 0.5), NodeSpec::iot("b", 1, 1, 1.0)};
  const auto mu = access_from_targets(nodes, std::vector<double>{0.1, 0.2});
  EXPECT_NEAR(mu[0], 0.5, 1e-15);
  EXPECT_NEAR(mu[1], 0.5, 1e-15);
}

TEST(Targets, SimplexProjection) {
  const auto p = project_to_simplex({0.5, 0.8, -0.3});
  EXPECT_NEAR(p[0], 0.35, 1e-12);
  EXPECT_NEAR(p[1], 0.65, 1e-12);
  EXPECT_EQ(p[2], 0.0);
}
