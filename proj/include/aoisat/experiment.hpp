#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "aoisat/analytics.hpp"
#include "aoisat/coverage.hpp"
#include "aoisat/policies.hpp"
#include "aoisat/scenario.hpp"
#include "aoisat/sim.hpp"
#include "aoisat/targets.hpp"

namespace aoisat {

// ---------------------------------------------------------------------------
// Worker pool

/// Worker count: explicit value if positive, else AOISAT_WORKERS, else the
/// hardware concurrency.
inline unsigned resolve_workers(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  if (const char* env = std::getenv("AOISAT_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs task(i) for i in [0, n) on up to `workers` threads. Results are
/// indexed by i, so output order never depends on scheduling.
template <typename Result>
std::vector<Result> parallel_map(std::size_t n, unsigned workers, const std::function<Result(std::size_t)>& task) {
  std::vector<Result> out(n);
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = task(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const auto i = next.fetch_add(1);
        if (i >= n) return;
        try {
          out[i] = task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

// ---------------------------------------------------------------------------
// Policy construction

struct PolicySettings {
  std::optional<std::vector<double>> sr_access;    // nullopt: derived from throughput targets
  std::optional<std::vector<double>> sr_u_period;  // nullopt: renormalize, or targets when sr_access is auto
  UnavailableBehavior sr_unavailable = UnavailableBehavior::renormalize;
  double mw_beta = 1.0;
  std::optional<std::vector<double>> mw_targets;  // nullopt: solve_targets
  bool mw_allow_idle = false;
};

struct CoverageSettings {
  std::int64_t horizon = 1'000'000;
  std::uint64_t seed = 0;
};

inline CoverageMatrix scenario_coverage(const Scenario& scenario, const CoverageSettings& settings) {
  return long_run_coverage(scenario.graph(), scenario.nodes(), scenario.availability(), settings.horizon,
                           settings.seed);
}

/// Coverage restricted to the terrestrial columns of `full`.
inline CoverageMatrix drop_column(const CoverageMatrix& full, std::optional<NodeIndex> column) {
  if (!column) return full;
  CoverageMatrix out(full.cells(), full.nodes() - 1);
  for (std::size_t m = 0; m < full.cells(); ++m)
    for (std::size_t k = 0, j = 0; k < full.nodes(); ++k)
      if (static_cast<NodeIndex>(k) != *column) out.at(m, j++) = full.at(m, k);
  return out;
}

inline std::vector<double> drop_entry(std::span<const double> v, std::optional<NodeIndex> index) {
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (!index || static_cast<NodeIndex>(k) != *index) out.push_back(v[k]);
  return out;
}

inline std::vector<double> insert_zero(std::vector<double> v, std::optional<NodeIndex> index) {
  if (index) v.insert(v.begin() + *index, 0.0);
  return v;
}

/// Optimal stationary randomized policy: access probabilities proportional to
/// nu_k / p_k from the target program, with a terrestrial-only solve for the
/// U-period when a satellite is present.
inline RandomizedPolicy optimal_randomized(const Scenario& scenario, const CoverageMatrix& f) {
  const auto& nodes = scenario.nodes();
  const auto weights = scenario.graph().weights();
  RandomizedPolicy sr;
  sr.access = access_from_targets(nodes, solve_targets(nodes, weights, f).nu);
  if (const auto sat = scenario.satellite()) {
    const auto ground = scenario.without_satellite();
    const auto fg = drop_column(f, sat);
    sr.u_period = insert_zero(access_from_targets(ground.nodes(), solve_targets(ground.nodes(), weights, fg).nu), sat);
  }
  return sr;
}

inline RandomizedPolicy build_randomized(const Scenario& scenario, const PolicySettings& s, const CoverageMatrix& f) {
  if (!s.sr_access) {
    auto sr = optimal_randomized(scenario, f);
    if (s.sr_u_period) sr.u_period = s.sr_u_period;
    sr.unavailable = s.sr_unavailable;
    return sr;
  }
  RandomizedPolicy sr{*s.sr_access, s.sr_u_period, s.sr_unavailable};
  validate(sr, scenario);
  return sr;
}

inline MaxWeightState build_max_weight(const Scenario& scenario, const PolicySettings& s, const CoverageMatrix& f) {
  auto targets = s.mw_targets ? *s.mw_targets : solve_targets(scenario.nodes(), scenario.graph().weights(), f).nu;
  MaxWeightState mw(std::move(targets), s.mw_beta, s.mw_allow_idle);
  validate(mw, scenario);
  return mw;
}

inline Policy build_policy(std::string_view name, const Scenario& scenario, const PolicySettings& s,
                           const CoverageMatrix& f) {
  if (name == "sr") return build_randomized(scenario, s, f);
  if (name == "mw") return build_max_weight(scenario, s, f);
  if (name == "greedy") return GreedyPolicy{};
  if (name == "mwl1") return Mwl1Policy{};
  throw ConfigError("unknown policy '" + std::string(name) + "' (expected sr, mw, greedy or mwl1)");
}

/// Distribution a randomized policy uses while the satellite is unavailable,
/// with the satellite entry removed: the terrestrial-only counterpart.
inline RandomizedPolicy terrestrial_counterpart(const RandomizedPolicy& sr, std::optional<NodeIndex> satellite) {
  if (!satellite) return sr;
  RandomizedPolicy ground;
  ground.access = drop_entry(sr.effective(false, satellite), satellite);
  return ground;
}

// ---------------------------------------------------------------------------
// Scenario parameters reachable from sweeps and comparisons

enum class Param { p_sat, l_sat, lambda_a, lambda_u };

inline Param parse_param(std::string_view s) {
  if (s == "p_sat") return Param::p_sat;
  if (s == "l_sat") return Param::l_sat;
  if (s == "lambda_a") return Param::lambda_a;
  if (s == "lambda_u") return Param::lambda_u;
  throw ConfigError("unknown parameter '" + std::string(s) + "' (expected p_sat, l_sat, lambda_a or lambda_u)");
}

inline std::string_view to_string(Param p) {
  switch (p) {
    case Param::p_sat: return "p_sat";
    case Param::l_sat: return "l_sat";
    case Param::lambda_a: return "lambda_a";
    case Param::lambda_u: return "lambda_u";
  }
  return "?";
}

inline Scenario apply_parameter(const Scenario& scenario, Param param, double value) {
  const auto sat = scenario.satellite();
  if (!sat) throw ConfigError("parameter " + std::string(to_string(param)) + " needs a satellite node");
  switch (param) {
    case Param::p_sat:
    case Param::l_sat: {
      auto nodes = scenario.nodes();
      auto& n = nodes[static_cast<std::size_t>(*sat)];
      if (param == Param::p_sat)
        n.success_prob = value;
      else
        n.packets = static_cast<int>(std::lround(value));
      return scenario.with_nodes(std::move(nodes));
    }
    case Param::lambda_a:
    case Param::lambda_u: {
      const auto& av = *scenario.availability();
      if (!av.is_geometric())
        throw UnsupportedError("parameter " + std::string(to_string(param)) + " requires the geometric availability model");
      const double la = param == Param::lambda_a ? value : av.lambda_a();
      const double lu = param == Param::lambda_u ? value : av.lambda_u();
      return scenario.with_availability(AvailabilityProcess::geometric(la, lu, av.initial_state()));
    }
  }
  return scenario;
}

// ---------------------------------------------------------------------------
// Runs and aggregation

struct RunRow {
  std::string scenario;
  std::string policy;
  std::uint64_t seed = 0;
  std::int64_t horizon = 0;
  std::int64_t burn_in = 0;
  RunSummary summary;
  double bound = 0.0;  // lower bound evaluated at this run's throughputs
  std::optional<double> wall_ms;
  std::vector<CycleRecord> cycles;
};

struct RunPlan {
  std::vector<std::string> policies{"sr", "mw", "greedy", "mwl1"};
  std::vector<std::uint64_t> seeds{1};
  std::int64_t horizon = 1'000'000;
  std::int64_t burn_in = 0;
  int workers = 0;
  bool timing = false;
  bool record_cycles = false;
};

/// Lower bound at the given throughputs; nodes that never cover a cell are
/// ignored, and a cell with no delivered updates gives no bound.
inline std::optional<double> bound_at(const Scenario& scenario, const CoverageMatrix& f, std::span<const double> nu) {
  try {
    return lower_bound(scenario.nodes(), scenario.graph().weights(), f, allocation_from_throughput(f, nu)).value;
  } catch (const InfeasibleError&) {
    return std::nullopt;
  }
}

/// All (policy, seed) pairs, in policy-major order.
inline std::vector<RunRow> run_all(const Scenario& scenario, const PolicySettings& settings, const CoverageMatrix& f,
                                   const RunPlan& plan) {
  std::vector<Policy> policies;
  for (const auto& name : plan.policies) policies.push_back(build_policy(name, scenario, settings, f));
  const std::size_t n = policies.size() * plan.seeds.size();
  return parallel_map<RunRow>(n, resolve_workers(plan.workers), [&](std::size_t i) {
    const auto& policy = policies[i / plan.seeds.size()];
    const auto seed = plan.seeds[i % plan.seeds.size()];
    const auto start = std::chrono::steady_clock::now();
    auto result = run(scenario, policy, {plan.horizon, seed, plan.burn_in, plan.record_cycles});
    RunRow row;
    row.scenario = scenario.id();
    row.policy = std::string(policy_name(policy));
    row.seed = seed;
    row.horizon = plan.horizon;
    row.burn_in = plan.burn_in;
    row.bound = bound_at(scenario, f, result.summary.throughput).value_or(std::nan(""));
    if (plan.timing)
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    row.summary = std::move(result.summary);
    row.cycles = std::move(result.cycles);
    return row;
  });
}

struct Estimate {
  double mean = 0.0;
  std::optional<double> half_width;  // 1.96 s / sqrt(n), only for n >= 2
  std::size_t n = 0;
};

inline Estimate estimate(std::span<const double> xs) {
  Estimate e;
  e.n = xs.size();
  if (xs.empty()) return e;
  double sum = 0.0;
  for (double x : xs) sum += x;
  e.mean = sum / static_cast<double>(xs.size());
  if (xs.size() >= 2) {
    double ss = 0.0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    e.half_width = 1.96 * sd / std::sqrt(static_cast<double>(xs.size()));
  }
  return e;
}

struct AggregateRow {
  std::string scenario;
  std::string policy;
  Estimate ewsaoi;
  Estimate ewspaoi;  // over runs that produced a value
  double bound_max = 0.0;
};

inline std::vector<AggregateRow> aggregate(std::span<const RunRow> rows) {
  std::vector<AggregateRow> out;
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i;
    std::vector<double> age, peak;
    double bound = -std::numeric_limits<double>::infinity();
    while (j < rows.size() && rows[j].policy == rows[i].policy && rows[j].scenario == rows[i].scenario) {
      age.push_back(rows[j].summary.ewsaoi);
      if (rows[j].summary.ewspaoi) peak.push_back(*rows[j].summary.ewspaoi);
      if (!std::isnan(rows[j].bound)) bound = std::max(bound, rows[j].bound);
      ++j;
    }
    out.push_back({rows[i].scenario, rows[i].policy, estimate(age), estimate(peak), bound});
    i = j;
  }
  return out;
}

}  // namespace aoisat
