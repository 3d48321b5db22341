#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "aoisat/availability.hpp"
#include "aoisat/error.hpp"
#include "aoisat/graph.hpp"
#include "aoisat/node.hpp"
#include "aoisat/rng.hpp"

namespace aoisat {

/// f_{m,k}(t): can node k refresh cell m at this instant?
inline bool instantaneous_coverage(const CellGraph& graph, const NodeSpec& node, CellId cell,
                                   std::optional<CellId> uav_position, std::optional<bool> sat_state) {
  if (!graph.contains(cell)) throw LookupError("unknown cell id " + std::to_string(cell));
  switch (node.kind) {
    case NodeKind::iot:
      if (uav_position || sat_state) throw ContractError("IoT coverage takes no position or satellite state");
      return node.home_cell == cell;
    case NodeKind::uav: {
      if (!uav_position) throw ContractError("UAV coverage requires the UAV position");
      if (sat_state) throw ContractError("UAV coverage takes no satellite state");
      const auto dist = graph.distances_from(*uav_position);
      return dist[static_cast<std::size_t>(cell)] <= node.radius;
    }
    case NodeKind::satellite:
      if (!sat_state) throw ContractError("satellite coverage requires the availability state");
      if (uav_position) throw ContractError("satellite coverage takes no UAV position");
      return *sat_state;
  }
  return false;
}

/// Per-node, per-position coverage sets, precomputed for the simulator.
class CoverageTable {
 public:
  CoverageTable() = default;

  CoverageTable(const CellGraph& graph, const std::vector<NodeSpec>& nodes) {
    all_cells_.resize(graph.cell_count());
    std::iota(all_cells_.begin(), all_cells_.end(), CellId{0});
    sets_.resize(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const auto& n = nodes[k];
      switch (n.kind) {
        case NodeKind::iot:
          sets_[k].push_back({*n.home_cell});
          break;
        case NodeKind::uav:
          for (std::size_t pos = 0; pos < graph.cell_count(); ++pos)
            sets_[k].push_back(neighborhood(graph, static_cast<CellId>(pos), n.radius));
          break;
        case NodeKind::satellite:
          break;
      }
    }
  }

  /// Cells node k would refresh if it generated an update now.
  std::span<const CellId> cells(const NodeSpec& node, NodeIndex k, CellId uav_position, bool sat_available) const {
    const auto& s = sets_[static_cast<std::size_t>(k)];
    switch (node.kind) {
      case NodeKind::iot:
        return s.front();
      case NodeKind::uav:
        return s[static_cast<std::size_t>(uav_position)];
      case NodeKind::satellite:
        return sat_available ? std::span<const CellId>(all_cells_) : std::span<const CellId>();
    }
    return {};
  }

 private:
  std::vector<std::vector<std::vector<CellId>>> sets_;
  std::vector<CellId> all_cells_;
};

/// UAV position state; moves one hop after each completed update.
class UavMotion {
 public:
  explicit UavMotion(const NodeSpec& node) : position_(node.initial_position()) {
    if (node.mobility.kind == MobilityKind::cyclic_route) {
      const auto& r = node.mobility.route;
      const auto it = std::find(r.begin(), r.end(), position_);
      route_index_ = it == r.end() ? 0 : static_cast<std::size_t>(it - r.begin());
      position_ = r[route_index_];
    }
  }

  CellId position() const noexcept { return position_; }

  void advance(const CellGraph& graph, const NodeSpec& node, Rng& rng) {
    if (node.mobility.kind == MobilityKind::cyclic_route) {
      route_index_ = (route_index_ + 1) % node.mobility.route.size();
      position_ = node.mobility.route[route_index_];
      return;
    }
    const auto& nbrs = graph.neighbors(position_);
    if (nbrs.empty()) return;
    position_ = nbrs[rng.below(nbrs.size())];
  }

 private:
  CellId position_ = 0;
  std::size_t route_index_ = 0;
};

/// Long-run coverage fractions f_{m,k}, cells x nodes.
class CoverageMatrix {
 public:
  CoverageMatrix() = default;
  CoverageMatrix(std::size_t cells, std::size_t nodes) : cells_(cells), nodes_(nodes), f_(cells * nodes, 0.0) {}

  std::size_t cells() const noexcept { return cells_; }
  std::size_t nodes() const noexcept { return nodes_; }

  double& at(std::size_t cell, std::size_t node) { return f_[cell * nodes_ + node]; }
  double at(std::size_t cell, std::size_t node) const { return f_[cell * nodes_ + node]; }

  double row_sum(std::size_t cell) const {
    double s = 0.0;
    for (std::size_t k = 0; k < nodes_; ++k) s += at(cell, k);
    return s;
  }

 private:
  std::size_t cells_ = 0;
  std::size_t nodes_ = 0;
  std::vector<double> f_;
};

/// Time fraction each cell is occupied by a UAV when its position dwell
/// equals its own negative-binomial update duration (trials to l_k
/// successes), ignoring channel contention.
inline std::vector<double> uav_occupancy(const CellGraph& graph, const NodeSpec& node, std::int64_t horizon, Rng& rng) {
  std::vector<double> occupancy(graph.cell_count(), 0.0);
  UavMotion motion(node);
  std::int64_t t = 0;
  while (t < horizon) {
    std::int64_t dwell = 0;
    for (int i = 0; i < node.packets; ++i) dwell += rng.trials_to_success(node.success_prob);
    dwell = std::min(dwell, horizon - t);
    occupancy[static_cast<std::size_t>(motion.position())] += static_cast<double>(dwell);
    t += dwell;
    motion.advance(graph, node, rng);
  }
  for (auto& o : occupancy) o /= static_cast<double>(horizon);
  return occupancy;
}

/// Empirical long-run coverage: exact rows for IoT sensors, the sampled
/// availability fraction for the satellite, and simulated mobility for UAVs.
inline CoverageMatrix long_run_coverage(const CellGraph& graph, const std::vector<NodeSpec>& nodes,
                                        const std::optional<AvailabilityProcess>& availability, std::int64_t horizon,
                                        std::uint64_t seed) {
  if (horizon < 1) throw ContractError("coverage horizon must be >= 1");
  CoverageMatrix f(graph.cell_count(), nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto& n = nodes[k];
    switch (n.kind) {
      case NodeKind::iot:
        f.at(static_cast<std::size_t>(*n.home_cell), k) = 1.0;
        break;
      case NodeKind::uav: {
        Rng rng(splitmix64(seed + k), Stream::coverage);
        const auto occupancy = uav_occupancy(graph, n, horizon, rng);
        for (std::size_t pos = 0; pos < occupancy.size(); ++pos) {
          if (occupancy[pos] == 0.0) continue;
          for (CellId m : neighborhood(graph, static_cast<CellId>(pos), n.radius))
            f.at(static_cast<std::size_t>(m), k) += occupancy[pos];
        }
        break;
      }
      case NodeKind::satellite: {
        if (!availability) throw ConfigError("satellite node present but no availability model configured");
        auto proc = *availability;
        proc.reset();
        Rng rng(seed, Stream::availability);
        std::int64_t on = 0;
        for (std::int64_t t = 0; t < horizon; ++t) on += proc.step(rng) ? 1 : 0;
        const double frac = static_cast<double>(on) / static_cast<double>(horizon);
        for (std::size_t m = 0; m < graph.cell_count(); ++m) f.at(m, k) = frac;
        break;
      }
    }
  }
  return f;
}

}  // namespace aoisat
