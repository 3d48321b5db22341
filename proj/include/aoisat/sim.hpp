#pragma once

#include <cassert>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "aoisat/availability.hpp"
#include "aoisat/coverage.hpp"
#include "aoisat/error.hpp"
#include "aoisat/policies.hpp"
#include "aoisat/rng.hpp"
#include "aoisat/scenario.hpp"

namespace aoisat {

struct SimOptions {
  std::int64_t horizon = 1;
  std::uint64_t seed = 0;
  std::int64_t burn_in = 0;    // slots excluded from every metric
  bool record_cycles = false;  // keep the full per-cycle list
};

/// One completed update cycle of one cell. waiting counts the slots strictly
/// between the previous completion and the generation slot; service counts
/// every slot of the completing update, so peak = previous_service + waiting + service.
struct CycleRecord {
  CellId cell = 0;
  std::int64_t index = 0;  // 1-based per cell
  std::int64_t waiting = 0;
  std::int64_t service = 0;
  std::int64_t previous_service = 0;
  std::int64_t peak = 0;
  std::int64_t completed_at = 0;
  NodeIndex node = 0;
  bool interior = false;  // false for a cell's first cycle
};

struct SimState {
  std::int64_t t = 0;
  std::optional<NodeIndex> holder;  // z_k(t)
  std::int64_t packets_remaining = 0;
  std::int64_t generated_at = 0;           // tau^S of the in-service update
  std::vector<std::int64_t> system_time;   // S_k(t)
  std::vector<CellId> snapshot;            // cells covered at generation
  std::vector<std::int64_t> ages;          // A_m(t)
  bool sat_state = false;                  // M(t) of the last simulated slot
  std::vector<CellId> uav_positions;       // -1 for non-UAV nodes
};

/// A_m(t+1) = S_k(t) + 1 on the covered cells, A_m(t) + 1 elsewhere.
inline void reset_ages(std::span<std::int64_t> ages, std::int64_t system_time, std::span<const CellId> covered) {
  for (auto& a : ages) ++a;
  for (CellId m : covered) ages[static_cast<std::size_t>(m)] = system_time + 1;
}

/// Bernoulli(p) packet outcome from the run's packet stream.
inline bool attempt_packet(double p, Rng& rng) { return rng.bernoulli(p); }

class MetricsAccumulator {
 public:
  MetricsAccumulator() = default;
  MetricsAccumulator(std::size_t cells, std::size_t nodes)
      : age_sum(cells, 0), peak_sum(cells, 0), peak_count(cells, 0), completed(nodes, 0), initiated(nodes, 0),
        first_packet_failures(nodes, 0), busy_slots(nodes, 0) {}

  std::vector<std::int64_t> age_sum;  // sum over measured slots of A_m(t+1)
  std::vector<std::int64_t> peak_sum;
  std::vector<std::int64_t> peak_count;
  std::vector<std::int64_t> completed;  // d_k
  std::vector<std::int64_t> initiated;  // y_k
  std::vector<std::int64_t> first_packet_failures;
  std::vector<std::int64_t> busy_slots;
  std::int64_t failed_sat_updates = 0;
  std::int64_t measured_slots = 0;
};

struct RunSummary {
  double ewsaoi = 0.0;
  std::optional<double> ewspaoi;  // absent if some cell never completed an interior cycle
  std::vector<double> mean_age;
  std::vector<std::optional<double>> mean_peak;
  std::vector<double> throughput;  // nu_k, updates per slot
  std::int64_t failed_sat_updates = 0;
  std::int64_t horizon = 0;
};

inline RunSummary finalize(const MetricsAccumulator& acc, std::span<const double> weights) {
  RunSummary out;
  const auto cells = acc.age_sum.size();
  const double slots = static_cast<double>(acc.measured_slots);
  out.horizon = acc.measured_slots;
  out.failed_sat_updates = acc.failed_sat_updates;
  out.mean_age.resize(cells);
  out.mean_peak.resize(cells);
  double weighted_age = 0.0, weighted_peak = 0.0;
  bool all_peaks = true;
  for (std::size_t m = 0; m < cells; ++m) {
    out.mean_age[m] = slots > 0 ? static_cast<double>(acc.age_sum[m]) / slots : 0.0;
    weighted_age += weights[m] * out.mean_age[m];
    if (acc.peak_count[m] > 0) {
      out.mean_peak[m] = static_cast<double>(acc.peak_sum[m]) / static_cast<double>(acc.peak_count[m]);
      weighted_peak += weights[m] * *out.mean_peak[m];
    } else {
      all_peaks = false;
    }
  }
  out.ewsaoi = weighted_age / static_cast<double>(cells);
  if (all_peaks) out.ewspaoi = weighted_peak / static_cast<double>(cells);
  out.throughput.resize(acc.completed.size());
  for (std::size_t k = 0; k < acc.completed.size(); ++k)
    out.throughput[k] = slots > 0 ? static_cast<double>(acc.completed[k]) / slots : 0.0;
  return out;
}

struct RunResult {
  MetricsAccumulator metrics;
  std::vector<CycleRecord> cycles;
  RunSummary summary;
  Policy final_policy;
};

/// Slot-by-slot simulation of the shared channel. Deterministic given the seed.
class Simulator {
 public:
  Simulator(const Scenario& scenario, Policy policy, SimOptions options)
      : scenario_(&scenario),
        policy_(std::move(policy)),
        options_(options),
        avail_rng_(options.seed, Stream::availability),
        packet_rng_(options.seed, Stream::packets),
        policy_rng_(options.seed, Stream::policy),
        mobility_rng_(options.seed, Stream::mobility),
        metrics_(scenario.cell_count(), scenario.node_count()) {
    if (options_.horizon < 1) throw ConfigError("horizon must be >= 1");
    if (options_.burn_in < 0 || options_.burn_in >= options_.horizon)
      throw ConfigError("burn-in must lie in [0, horizon)");
    validate(policy_, scenario);
    if (scenario.availability()) availability_ = *scenario.availability();
    availability_.reset();

    const auto cells = scenario.cell_count();
    const auto nodes = scenario.node_count();
    state_.ages.assign(cells, 1);
    state_.system_time.assign(nodes, 1);
    state_.uav_positions.assign(nodes, -1);
    motion_.reserve(nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
      motion_.emplace_back(scenario.nodes()[k]);
      if (scenario.nodes()[k].kind == NodeKind::uav) state_.uav_positions[k] = motion_[k].position();
    }
    refresh_.resize(nodes);
    last_completion_.assign(cells, -1);
    last_service_.assign(cells, 0);
    cycle_index_.assign(cells, 0);
  }

  // Keeps a pointer to the scenario, so it must outlive the simulator.
  Simulator(Scenario&&, Policy, SimOptions) = delete;

  bool done() const noexcept { return state_.t >= options_.horizon; }
  const SimState& state() const noexcept { return state_; }
  const MetricsAccumulator& metrics() const noexcept { return metrics_; }
  const std::vector<CycleRecord>& cycles() const noexcept { return cycles_; }
  const Policy& policy() const noexcept { return policy_; }

  /// Simulates slot t and leaves the state at t+1.
  void step() {
    const auto& nodes = scenario_->nodes();
    const auto sat = scenario_->satellite();
    const std::int64_t t = state_.t;
    const bool measured = t >= options_.burn_in;

    state_.sat_state = sat ? availability_.step(avail_rng_) : false;

    // Satellite loses visibility mid-update: the update fails and the
    // channel is free for a new decision in this same slot.
    if (state_.holder && sat && *state_.holder == *sat && !state_.sat_state) {
      if (measured) ++metrics_.failed_sat_updates;
      state_.system_time[static_cast<std::size_t>(*sat)] = 1;
      release(*sat, false);
    }

    if (!state_.holder) {
      const auto choice = decide();
      if (!choice) {
        on_epoch_end(policy_, std::nullopt, false);
      } else {
        const auto k = static_cast<std::size_t>(*choice);
        state_.holder = *choice;
        state_.generated_at = t;
        state_.packets_remaining = nodes[k].packets;
        state_.system_time[k] = 1;
        const auto cells = refresh_[k];
        state_.snapshot.assign(cells.begin(), cells.end());
        if (measured) ++metrics_.initiated[k];
      }
    }
    assert(!(state_.holder && sat && *state_.holder == *sat && !state_.sat_state));

    bool completed = false;
    bool dropped = false;
    if (state_.holder) {
      const auto k = static_cast<std::size_t>(*state_.holder);
      if (measured) ++metrics_.busy_slots[k];
      if (attempt_packet(nodes[k].success_prob, packet_rng_)) {
        completed = --state_.packets_remaining == 0;
      } else if (t == state_.generated_at) {
        dropped = true;  // first packet lost: channel idles immediately
        if (measured) ++metrics_.first_packet_failures[k];
      }
    }

    if (completed) {
      const auto k = *state_.holder;
      const std::int64_t service = t - state_.generated_at + 1;  // S_k(t)
      for (CellId m : state_.snapshot) record_cycle(m, k, service, measured);
      reset_ages(state_.ages, service, state_.snapshot);
    } else {
      for (auto& a : state_.ages) ++a;
    }

    if (measured) {
      for (std::size_t m = 0; m < state_.ages.size(); ++m) metrics_.age_sum[m] += state_.ages[m];
      ++metrics_.measured_slots;
    }

    if (completed) {
      const auto k = *state_.holder;
      if (measured) ++metrics_.completed[static_cast<std::size_t>(k)];
      state_.system_time[static_cast<std::size_t>(k)] = 1;
      release(k, true);
      if (nodes[static_cast<std::size_t>(k)].kind == NodeKind::uav) {
        auto& motion = motion_[static_cast<std::size_t>(k)];
        motion.advance(scenario_->graph(), nodes[static_cast<std::size_t>(k)], mobility_rng_);
        state_.uav_positions[static_cast<std::size_t>(k)] = motion.position();
      }
    } else if (dropped) {
      const auto k = *state_.holder;
      state_.system_time[static_cast<std::size_t>(k)] = 1;
      release(k, false);
    } else if (state_.holder) {
      ++state_.system_time[static_cast<std::size_t>(*state_.holder)];
    }
    ++state_.t;
  }

  void run_to_end() {
    while (!done()) step();
  }

  RunResult finish() && {
    RunResult out;
    out.summary = finalize(metrics_, scenario_->graph().weights());
    out.metrics = std::move(metrics_);
    out.cycles = std::move(cycles_);
    out.final_policy = std::move(policy_);
    return out;
  }

 private:
  std::optional<NodeIndex> decide() {
    const auto& nodes = scenario_->nodes();
    const auto& table = scenario_->coverage_table();
    for (std::size_t k = 0; k < nodes.size(); ++k)
      refresh_[k] = table.cells(nodes[k], static_cast<NodeIndex>(k), state_.uav_positions[k], state_.sat_state);
    SelectionContext ctx{state_.ages, scenario_->graph().weights(), nodes, refresh_, state_.sat_state,
                         scenario_->satellite()};
    return select(policy_, ctx, policy_rng_);
  }

  void release(NodeIndex k, bool delivered) {
    state_.holder.reset();
    state_.packets_remaining = 0;
    state_.snapshot.clear();
    on_epoch_end(policy_, k, delivered);
  }

  void record_cycle(CellId m, NodeIndex k, std::int64_t service, bool measured) {
    const auto i = static_cast<std::size_t>(m);
    CycleRecord rec;
    rec.cell = m;
    rec.index = ++cycle_index_[i];
    rec.waiting = state_.generated_at - last_completion_[i] - 1;
    rec.service = service;
    rec.previous_service = last_service_[i];
    rec.peak = state_.ages[i];
    rec.completed_at = state_.t;
    rec.node = k;
    rec.interior = last_completion_[i] >= 0;
    assert(rec.peak == rec.previous_service + rec.waiting + rec.service);
    if (measured && rec.interior) {
      metrics_.peak_sum[i] += rec.peak;
      ++metrics_.peak_count[i];
    }
    if (options_.record_cycles && measured) cycles_.push_back(rec);
    last_completion_[i] = state_.t;
    last_service_[i] = service;
  }

  const Scenario* scenario_;
  Policy policy_;
  SimOptions options_;
  AvailabilityProcess availability_ = AvailabilityProcess::geometric(0.5, 0.5);
  Rng avail_rng_;
  Rng packet_rng_;
  Rng policy_rng_;
  Rng mobility_rng_;
  SimState state_;
  MetricsAccumulator metrics_;
  std::vector<CycleRecord> cycles_;
  std::vector<UavMotion> motion_;
  std::vector<std::span<const CellId>> refresh_;
  std::vector<std::int64_t> last_completion_;
  std::vector<std::int64_t> last_service_;
  std::vector<std::int64_t> cycle_index_;
};

inline RunResult run(const Scenario& scenario, Policy policy, const SimOptions& options) {
  Simulator sim(scenario, std::move(policy), options);
  sim.run_to_end();
  return std::move(sim).finish();
}

}  // namespace aoisat
