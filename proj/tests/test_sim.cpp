#include <gtest/gtest.h>

#include "support.hpp"

using namespace aoisat;
using namespace aoisat::testing;

namespace {

Scenario single(int l, double p) { return Scenario("one", build_grid(1, 1), {NodeSpec::iot("a", 0, l, p)}); }

}  // namespace

TEST(Simulator, PerfectLinkHoldsAgeAtTwo) {
  const auto r = run(single(1, 1.0), RandomizedPolicy{{1.0}}, {1000, 1});
  EXPECT_DOUBLE_EQ(r.summary.ewsaoi, 2.0);
  EXPECT_DOUBLE_EQ(*r.summary.ewspaoi, 2.0);
  EXPECT_DOUBLE_EQ(r.summary.throughput[0], 1.0);
}

TEST(Simulator, SinglePacketAgeIsOnePlusInverseP) {
  // After a success the age is 2; it then grows by one per failed slot, so
  // A = 1 + G with G ~ Geometric(p) on {1, 2, ...}.
  for (double p : {0.3, 0.7}) {
    const auto r = run(single(1, p), RandomizedPolicy{{1.0}}, {1'000'000, 4, 1000});
    EXPECT_NEAR(r.summary.ewsaoi, 1.0 + 1.0 / p, 0.01 * (1.0 + 1.0 / p)) << "p=" << p;
    EXPECT_NEAR(r.summary.throughput[0], p, 0.005);
  }
}

TEST(Simulator, DeterministicLongUpdateSawtooth) {
  // l=3, p=1: each update occupies 3 slots and resets the age to 4, so the
  // age runs 5, 6, 4, 5, 6, 4, ... after the first update.
  const auto s = single(3, 1.0);
  Simulator sim(s, RandomizedPolicy{{1.0}}, {12, 0, 0, true});
  std::vector<std::int64_t> ages;
  while (!sim.done()) {
    sim.step();
    ages.push_back(sim.state().ages[0]);
  }
  EXPECT_EQ(ages, (std::vector<std::int64_t>{2, 3, 4, 5, 6, 4, 5, 6, 4, 5, 6, 4}));
  for (const auto& c : sim.cycles()) {
    EXPECT_EQ(c.service, 3);
    EXPECT_EQ(c.waiting, 0);
    EXPECT_EQ(c.peak, c.previous_service + c.waiting + c.service);
  }
}

TEST(Simulator, SameSeedSameRun) {
  const auto s = satellite_scenario();
  const auto a = run(s, half_satellite_policy(), {200000, 42, 1000});
  const auto b = run(s, half_satellite_policy(), {200000, 42, 1000});
  const auto c = run(s, half_satellite_policy(), {200000, 43, 1000});
  EXPECT_EQ(a.metrics.age_sum, b.metrics.age_sum);
  EXPECT_EQ(a.summary.failed_sat_updates, b.summary.failed_sat_updates);
  EXPECT_NE(a.metrics.age_sum, c.metrics.age_sum);
}

TEST(Simulator, BurnInExcludesEarlySlots) {
  const auto r = run(single(1, 0.5), RandomizedPolicy{{1.0}}, {1000, 1, 400});
  EXPECT_EQ(r.summary.horizon, 600);
  EXPECT_THROW(run(single(1, 0.5), RandomizedPolicy{{1.0}}, {1000, 1, 1000}), ConfigError);
  EXPECT_THROW(run(single(1, 0.5), RandomizedPolicy{{1.0}}, {0, 1, 0}), ConfigError);
}

TEST(Simulator, CycleRecordsDecomposePeaks) {
  const auto s = ground_scenario();
  std::vector<double> mu(7, 1.0 / 7.0);
  const auto r = run(s, RandomizedPolicy{mu}, {200000, 3, 0, true});
  ASSERT_FALSE(r.cycles.empty());
  std::vector<std::int64_t> last(16, -1);
  for (const auto& c : r.cycles) {
    EXPECT_EQ(c.peak, c.previous_service + c.waiting + c.service);
    EXPECT_GE(c.waiting, 0);
    EXPECT_GE(c.service, s.node(c.node).packets);
    EXPECT_EQ(c.interior, last[static_cast<std::size_t>(c.cell)] >= 0);
    if (last[static_cast<std::size_t>(c.cell)] >= 0)
      EXPECT_EQ(c.completed_at - last[static_cast<std::size_t>(c.cell)], c.waiting + c.service);
    last[static_cast<std::size_t>(c.cell)] = c.completed_at;
  }
}

TEST(Simulator, SatelliteAbortsWhenVisibilityEnds) {
  // Always the satellite; the trace drops visibility every third slot, so a
  // 5-packet update can never finish.
  Scenario s("sat", build_grid(1, 2), {NodeSpec::satellite("s", 5, 1.0)}, AvailabilityProcess::trace({1, 1, 0}));
  const auto r = run(s, RandomizedPolicy{{1.0}}, {300, 0});
  EXPECT_EQ(r.summary.failed_sat_updates, 100);
  EXPECT_EQ(r.summary.throughput[0], 0.0);
  EXPECT_FALSE(r.summary.ewspaoi);
  // Visible for 6 slots with 5 packets: one update per window.
  Scenario ok("sat", build_grid(1, 2), {NodeSpec::satellite("s", 5, 1.0)},
              AvailabilityProcess::trace({1, 1, 1, 1, 1, 1, 0}));
  const auto r2 = run(ok, RandomizedPolicy{{1.0}}, {700, 0});
  EXPECT_EQ(r2.summary.failed_sat_updates, 100);  // the second start in each window is cut off
  EXPECT_NEAR(r2.summary.throughput[0], 1.0 / 7.0, 1e-12);
}

TEST(Simulator, FirstPacketLossFreesChannel) {
  // Two sensors, node a never delivers its first packet: every slot given to
  // a is wasted but never blocks b for more than that one slot.
  Scenario s("two", build_grid(1, 2), {NodeSpec::iot("a", 0, 2, 1e-9), NodeSpec::iot("b", 1, 1, 1.0)});
  const auto r = run(s, RandomizedPolicy{{0.5, 0.5}}, {400000, 8});
  EXPECT_NEAR(r.summary.throughput[1], 0.5, 0.005);
  EXPECT_NEAR(r.metrics.first_packet_failures[0] / 400000.0, 0.5, 0.005);
}

TEST(Simulator, MaxWeightDebtsStayBounded) {
  const auto s = satellite_scenario(40);
  const auto f = long_run_coverage(s.graph(), s.nodes(), s.availability(), 200000, 1);
  const auto t = solve_targets(s.nodes(), s.graph().weights(), f);
  auto r = run(s, MaxWeightState(t.nu, 1.0), {200000, 2});
  const auto& mw = std::get<MaxWeightState>(r.final_policy);
  EXPECT_GT(mw.epoch, 0);
  // Only the positive part is a queue; over-delivery leaves the debt negative.
  for (double x : mw.debts) EXPECT_LT(std::max(x, 0.0), 0.01 * static_cast<double>(mw.epoch)) << x;
}
