#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace aoisat;
using namespace aoisat::testing;

namespace {

// Trials needed for r successes.
std::int64_t trials(std::mt19937_64& gen, int r, double p) {
  std::geometric_distribution<std::int64_t> g(p);
  std::int64_t n = 0;
  for (int i = 0; i < r; ++i) n += g(gen) + 1;
  return n;
}

// Availability window on {1, 2, ...}.
std::int64_t window(std::mt19937_64& gen, double lambda) {
  return std::geometric_distribution<std::int64_t>(lambda)(gen) + 1;
}

}  // namespace

TEST(Moments, NegativeBinomialAgainstSampling) {
  std::mt19937_64 gen(1);
  for (auto [l, p] : {std::pair{3, 0.5}, std::pair{7, 0.9}}) {
    const auto m = nb_service_moments(l, p);
    double s1 = 0.0, s2 = 0.0;
    const int n = 300000;
    for (int i = 0; i < n; ++i) {
      const double x = static_cast<double>(trials(gen, l - 1, p));
      s1 += x;
      s2 += x * x;
    }
    EXPECT_NEAR(s1 / n, m.mean, 0.01 * m.mean);
    EXPECT_NEAR(s2 / n, m.second_moment, 0.015 * m.second_moment);
  }
  EXPECT_EQ(nb_service_moments(1, 0.3).mean, 0.0);
  EXPECT_THROW(nb_service_moments(0, 0.3), ContractError);
}

TEST(Moments, BlockingTimeAgainstSampling) {
  // One slot on a lost first packet, otherwise 1 + trials for l-1 more.
  std::mt19937_64 gen(2);
  std::bernoulli_distribution first(0.6);
  const auto m = blocking_moments(5, 0.6);
  EXPECT_DOUBLE_EQ(m.mean, 5.0);
  double s1 = 0.0, s2 = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double y = first(gen) ? 1.0 + static_cast<double>(trials(gen, 4, 0.6)) : 1.0;
    s1 += y;
    s2 += y * y;
  }
  EXPECT_NEAR(s1 / n, m.mean, 0.01 * m.mean);
  EXPECT_NEAR(s2 / n, m.second_moment, 0.015 * m.second_moment);
}

TEST(Moments, PsiGeneratingFunction) {
  EXPECT_NEAR(psi(0.95, 2, 0.6), 0.904, 5e-4);
  std::mt19937_64 gen(3);
  std::bernoulli_distribution first(0.7);
  double acc = 0.0;
  const int n = 300000;
  for (int i = 0; i < n; ++i) {
    const auto len = first(gen) ? 1 + trials(gen, 3, 0.7) : 1;
    acc += std::pow(0.9, static_cast<double>(len));
  }
  EXPECT_NEAR(acc / n, psi(0.9, 4, 0.7), 2e-3);
}

TEST(Satellite, GammaValuesAndModes) {
  EXPECT_NEAR(sat_gamma(0.6, 0.05, 2), 0.967741935, 1e-8);
  EXPECT_NEAR(sat_gamma(0.6, 0.05, 2, FormulaMode::strict), 0.919354839, 1e-8);
  for (int l : {2, 5, 20})
    EXPECT_NEAR(sat_gamma(0.6, 0.05, l) * (1.0 - 0.05), sat_gamma(0.6, 0.05, l, FormulaMode::strict), 1e-15);
  EXPECT_EQ(sat_gamma(0.3, 0.2, 1), 1.0);
}

TEST(Satellite, GammaMonotonicity) {
  for (double p = 0.1; p < 1.0; p += 0.1)
    for (double la = 0.01; la < 0.5; la += 0.05)
      for (int l = 2; l < 40; ++l) {
        const double g = sat_gamma(p, la, l);
        EXPECT_LE(sat_gamma(p, la, l + 1), g + 1e-12);
        EXPECT_LE(sat_gamma(p, la + 0.01, l), g + 1e-12);
        EXPECT_GE(sat_gamma(std::min(1.0, p + 0.05), la, l), g - 1e-12);
      }
}

TEST(Satellite, ConditionalServiceAndWasteAgainstSampling) {
  // S = trials for l-1 packets; the update survives when S <= T_A.
  std::mt19937_64 gen(4);
  const double p = 0.6, la = 0.05;
  const int l = 8;
  double ok = 0.0, s1 = 0.0, s2 = 0.0, lost = 0.0, w1 = 0.0, w2 = 0.0;
  const int n = 600000;
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(trials(gen, l - 1, p));
    const double t = static_cast<double>(window(gen, la));
    if (s <= t) {
      ok += 1.0;
      s1 += s;
      s2 += s * s;
    } else {
      lost += 1.0;
      w1 += t;
      w2 += t * t;
    }
  }
  EXPECT_NEAR(ok / n, sat_gamma(p, la, l), 2e-3);
  EXPECT_NEAR(s1 / ok, sat_conditional_service(p, la, l), 0.01 * s1 / ok);
  EXPECT_NEAR(s2 / ok, sat_conditional_service_second(p, la, l), 0.015 * s2 / ok);
  const auto wasted = sat_wasted_time(p, la, l);
  EXPECT_NEAR(w1 / lost, wasted.mean, 0.01 * wasted.mean);
  EXPECT_NEAR(w2 / lost, wasted.second_moment, 0.02 * wasted.second_moment);
}

TEST(Satellite, WastedSeriesConverges) {
  for (auto [p, la, l] : {std::tuple{0.6, 0.05, 20}, std::tuple{0.2, 0.001, 40}, std::tuple{0.95, 0.3, 3}}) {
    const double tol = 1e-10;
    const auto a = sat_wasted_time(p, la, l, FormulaMode::appendix, {tol, 10'000'000});
    const auto b = sat_wasted_time(p, la, l, FormulaMode::appendix, {tol / 2.0, 10'000'000});
    EXPECT_LT(std::abs(a.mean - b.mean), tol * std::max(1.0, a.mean));
    EXPECT_LT(std::abs(a.second_moment - b.second_moment), tol * std::max(1.0, a.second_moment));
  }
  EXPECT_THROW(sat_wasted_time(0.5, 1e-6, 30, FormulaMode::appendix, {1e-12, 10}), NumericError);
}

TEST(Satellite, StrictWasteIsShiftedByOne) {
  const auto a = sat_wasted_time(0.6, 0.05, 10);
  const auto s = sat_wasted_time(0.6, 0.05, 10, FormulaMode::strict);
  EXPECT_GT(std::abs(a.mean - s.mean), 1e-3);
  EXPECT_GT(s.mean, 1.0);
}

TEST(Satellite, BetaReachesAvailabilityLimitForMatchedLengths) {
  // Sensors and satellite all hold the channel for l slots on average, so
  // epochs are sampled in proportion to time: beta -> lambda_U/(lambda_A+lambda_U).
  std::vector<NodeSpec> nodes{NodeSpec::iot("a", 0, 2, 0.9), NodeSpec::iot("b", 1, 2, 0.9),
                              NodeSpec::satellite("s", 2, 0.6)};
  const std::vector<double> access{0.25, 0.25, 0.5}, u{0.5, 0.5, 0.0};
  EXPECT_NEAR(sat_beta(nodes, access, u, 2, 1e-6, 1e-6), 0.5, 1e-4);
  EXPECT_NEAR(sat_beta(nodes, access, u, 2, 1e-6, 3e-6), 0.75, 1e-4);
}

TEST(PeakNoSat, MatchesSimulationOnSmallNetwork) {
  Scenario s("line", build_grid(1, 3),
             {NodeSpec::iot("a", 0, 2, 0.9), NodeSpec::iot("b", 2, 3, 0.7), NodeSpec::uav("u", 1, 1, 4, 0.8)});
  const auto f = long_run_coverage(s.graph(), s.nodes(), s.availability(), 2'000'000, 1);
  const std::vector<double> mu{0.3, 0.3, 0.3};
  const auto rep = ewspaoi_no_sat(s.nodes(), s.graph().weights(), mu, f);
  double sim = 0.0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) sim += *run(s, RandomizedPolicy{mu}, {500000, seed, 1000}).summary.ewspaoi;
  EXPECT_LT(relative_error(rep.ewspaoi, sim / 4.0), 0.02) << rep.ewspaoi << " vs " << sim / 4.0;
}

TEST(PeakNoSat, NeverIncreasesWithReliability) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<NodeSpec> nodes{NodeSpec::iot("a", 0, 1 + trial % 4, u(gen)), NodeSpec::iot("b", 1, 2, u(gen)),
                                NodeSpec::uav("c", 0, 1, 3, u(gen))};
    CoverageMatrix f(2, 3);
    f.at(0, 0) = 1.0;
    f.at(1, 1) = 1.0;
    f.at(0, 2) = u(gen);
    f.at(1, 2) = u(gen);
    std::vector<double> mu{u(gen), u(gen), u(gen)};
    double total = mu[0] + mu[1] + mu[2];
    for (auto& m : mu) m /= total;
    const std::vector<double> w{1.0, 2.0};
    const double base = ewspaoi_no_sat(nodes, w, mu, f).ewspaoi;
    for (std::size_t k = 0; k < 3; ++k) {
      auto better = nodes;
      better[k].success_prob = std::min(1.0, better[k].success_prob + 0.05);
      EXPECT_LE(ewspaoi_no_sat(better, w, mu, f).ewspaoi, base + 1e-12) << "trial " << trial << " node " << k;
    }
  }
}

TEST(PeakNoSat, UncoveredCellIsInfeasible) {
  std::vector<NodeSpec> nodes{NodeSpec::iot("a", 0, 1, 0.5)};
  CoverageMatrix f(2, 1);
  f.at(0, 0) = 1.0;
  EXPECT_THROW(ewspaoi_no_sat(nodes, std::vector<double>{1.0, 1.0}, std::vector<double>{1.0}, f), InfeasibleError);
}

TEST(PeakWithSat, ZeroSatelliteAccessReducesToGround) {
  const auto s = satellite_scenario();
  const auto f = with_sat_column(long_run_coverage(s.graph(), s.nodes(), s.availability(), 500000, 2), s);
  std::vector<double> mu(8, 1.0 / 7.0);
  mu[7] = 0.0;
  const auto cmp = analyze_randomized(s, RandomizedPolicy{mu}, f);
  EXPECT_NEAR(cmp.with_sat, cmp.without_sat, 1e-9 * cmp.without_sat);
}

TEST(PeakWithSat, MatchesSimulationOnSmallNetwork) {
  Scenario s("pair", build_grid(1, 2),
             {NodeSpec::iot("a", 0, 2, 0.9), NodeSpec::iot("b", 1, 3, 0.8), NodeSpec::satellite("s", 6, 0.6)},
             AvailabilityProcess::geometric(0.02, 0.05));
  const auto f = with_sat_column(long_run_coverage(s.graph(), s.nodes(), s.availability(), 10, 1), s);
  const RandomizedPolicy sr{{0.25, 0.25, 0.5}};
  const auto cmp = analyze_randomized(s, sr, f);
  double sim = 0.0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) sim += *run(s, sr, {500000, seed, 1000}).summary.ewspaoi;
  EXPECT_LT(relative_error(cmp.with_sat, sim / 4.0), 0.05) << cmp.with_sat << " vs " << sim / 4.0;
}

TEST(PeakWithSat, StrictAndAppendixDiffer) {
  const auto s = satellite_scenario(20, 0.6, 0.05);
  const auto f = with_sat_column(long_run_coverage(s.graph(), s.nodes(), s.availability(), 200000, 2), s);
  const auto a = analyze_randomized(s, half_satellite_policy(), f);
  const auto b = analyze_randomized(s, half_satellite_policy(), f, {FormulaMode::strict});
  EXPECT_NEAR(a.satellite.gamma * 0.95, b.satellite.gamma, 1e-12);
  EXPECT_GT(std::abs(a.with_sat - b.with_sat), 0.1);
}

TEST(LowerBound, BelowSimulatedAgeOnSmallNetworks) {
  for (double p : {0.3, 0.9}) {
    Scenario s("pair", build_grid(1, 2), {NodeSpec::iot("a", 0, 1, p), NodeSpec::iot("b", 1, 3, 0.8)});
    const auto f = long_run_coverage(s.graph(), s.nodes(), s.availability(), 10, 1);
    const std::vector<double> mu{0.5, 0.5};
    const auto r = run(s, RandomizedPolicy{mu}, {300000, 1});
    const auto b = lower_bound(s.nodes(), s.graph().weights(), f, allocation_from_throughput(f, r.summary.throughput));
    EXPECT_LT(b.value, r.summary.ewsaoi);
    EXPECT_DOUBLE_EQ(b.constant_term, 0.5);
  }
}

TEST(LowerBound, SingleNodeClosedForm) {
  // One cell, one node: (1 + l/p) / 2 whatever the allocation.
  std::vector<NodeSpec> nodes{NodeSpec::iot("a", 0, 2, 0.8)};
  CoverageMatrix f(1, 1);
  f.at(0, 0) = 1.0;
  for (double nu : {0.4, 0.05}) {
    const auto b = lower_bound(nodes, std::vector<double>{1.0}, f, allocation_from_throughput(f, std::vector<double>{nu}));
    EXPECT_NEAR(b.value, 1.75, 1e-12);
  }
}

TEST(LowerBound, HomogeneousInWeights) {
  const auto s = ground_scenario();
  const auto f = long_run_coverage(s.graph(), s.nodes(), s.availability(), 100000, 1);
  const auto t = solve_targets(s.nodes(), s.graph().weights(), f);
  const auto alloc = allocation_from_throughput(f, t.nu);
  const auto a = lower_bound(s.nodes(), s.graph().weights(), f, alloc);
  const auto b = lower_bound(s.nodes(), std::vector<double>(16, 4.0), f, alloc);
  EXPECT_NEAR(b.constant_term, 4.0 * a.constant_term, 1e-12);
  EXPECT_NEAR(b.coupling_term, 4.0 * a.coupling_term, 1e-9);
}

TEST(Renewal, SawtoothAverage) {
  std::vector<CycleRecord> cycles;
  for (int i = 0; i < 5; ++i) cycles.push_back({0, i + 1, 0, 3, 3, 6, 3 * i + 2, 0, i > 0});
  const auto e = renewal_aoi_from_samples(cycles);
  EXPECT_DOUBLE_EQ(e.average_aoi, 5.0);  // ages 4, 5, 6
  EXPECT_DOUBLE_EQ(e.peak_records, 6.0);
  EXPECT_DOUBLE_EQ(e.peak_without_one, 6.0);
  EXPECT_THROW(renewal_aoi_from_samples(std::span<const CycleRecord>(cycles.data(), 2)), ContractError);
}

TEST(Renewal, AgreesWithTimeAverageOnRandomService) {
  Scenario s("one", build_grid(1, 1), {NodeSpec::iot("a", 0, 4, 0.6)});
  const auto r = run(s, RandomizedPolicy{{0.5}}, {400000, 3, 0, true});
  const auto e = renewal_aoi_from_samples(r.cycles);
  EXPECT_LT(relative_error(e.average_aoi, r.summary.ewsaoi), 0.01);
  EXPECT_LT(relative_error(e.peak_records, *r.summary.ewspaoi), 0.01);
}

TEST(AccessSplit, SignRuleOnSymmetricSensors) {
  const std::vector<SensorParams> sensors(4, SensorParams{0.25, 2, 0.9});
  for (auto [l_sat, p_sat] : {std::pair{1, 0.6}, std::pair{40, 0.3}}) {
    const auto c = iot_sat_coefficients(sensors, 0.01, 0.05, l_sat, p_sat);
    const double k = c.k[0];
    for (double v : c.k) EXPECT_DOUBLE_EQ(v, k);
    const auto choice = optimal_alpha(c);
    // The derivative of J has the sign of K, so the minimum sits at the end
    // K points away from.
    const double slope = split_objective(c, 0.51) - split_objective(c, 0.49);
    EXPECT_EQ(slope > 0.0, k > 0.0);
    EXPECT_EQ(choice.alpha, k > 0.0 ? 0.0 : 1.0);
    EXPECT_EQ(choice.regime, k > 0.0 ? SplitRegime::no_sat : SplitRegime::all_sat);
    EXPECT_LE(split_objective(c, choice.alpha), split_objective(c, 1.0 - choice.alpha));
  }
}

TEST(AccessSplit, MixedSignsMinimizeNumerically) {
  const std::vector<SensorParams> sensors{{0.7, 1, 0.95}, {0.3, 12, 0.3}};
  const auto c = iot_sat_coefficients(sensors, 0.01, 0.05, 6, 0.6);
  ASSERT_NE(c.k[0] > 0.0, c.k[1] > 0.0) << "fixture should have mixed signs";
  const auto choice = optimal_alpha(c);
  EXPECT_EQ(choice.regime, SplitRegime::interior);
  double best = 1e300, best_a = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    const double a = i / 100000.0;
    const double j = split_objective(c, a);
    if (j < best) best = j, best_a = a;
  }
  EXPECT_NEAR(choice.alpha, best_a, 1e-4);
  if (choice.closed_form) EXPECT_NEAR(*choice.closed_form, best_a, 1e-4);
}

TEST(AccessSplit, LongSatelliteUpdatesKeepSensors) {
  const std::vector<SensorParams> sensors(3, SensorParams{1.0 / 3.0, 2, 0.9});
  const auto c = iot_sat_coefficients(sensors, 0.01, 0.05, 100, 0.35);
  const auto choice = optimal_alpha(c);
  EXPECT_EQ(choice.alpha, 0.0);
  for (double a : {0.25, 0.5, 1.0}) EXPECT_LT(split_objective(c, 0.0), split_objective(c, a));
}

TEST(AccessSplit, PoleInsideIntervalIsReported) {
  const std::vector<SensorParams> sensors(3, SensorParams{1.0 / 3.0, 2, 0.9});
  EXPECT_THROW(optimal_alpha(iot_sat_coefficients(sensors, 0.01, 0.05, 100, 0.01)), NumericError);
}

TEST(AccessSplit, GoldenSectionFindsParabolaMinimum) {
  EXPECT_NEAR(golden_section_min([](double x) { return (x - 0.3) * (x - 0.3); }, 0.0, 1.0), 0.3, 1e-7);
  EXPECT_NEAR(golden_section_min([](double x) { return x; }, 0.0, 1.0), 0.0, 1e-7);
}
