#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "aoisat/error.hpp"
#include "aoisat/graph.hpp"

namespace aoisat {

using NodeIndex = std::int32_t;

enum class NodeKind { iot, uav, satellite };

inline std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::iot:
      return "iot";
    case NodeKind::uav:
      return "uav";
    case NodeKind::satellite:
      return "satellite";
  }
  return "?";
}

enum class MobilityKind { random_walk, cyclic_route };

struct Mobility {
  MobilityKind kind = MobilityKind::random_walk;
  std::vector<CellId> route;  // cyclic_route only
};

struct NodeSpec {
  std::string id;
  NodeKind kind = NodeKind::iot;
  int packets = 1;            // l_k
  double success_prob = 1.0;  // p_k
  std::optional<CellId> home_cell;
  int radius = 0;
  std::optional<CellId> start_cell;
  Mobility mobility;

  static NodeSpec iot(std::string id, CellId home, int packets, double p) {
    NodeSpec n;
    n.id = std::move(id);
    n.kind = NodeKind::iot;
    n.home_cell = home;
    n.packets = packets;
    n.success_prob = p;
    return n;
  }

  static NodeSpec uav(std::string id, CellId start, int radius, int packets, double p,
                      Mobility mobility = {}) {
    NodeSpec n;
    n.id = std::move(id);
    n.kind = NodeKind::uav;
    n.start_cell = start;
    n.radius = radius;
    n.packets = packets;
    n.success_prob = p;
    n.mobility = std::move(mobility);
    return n;
  }

  static NodeSpec satellite(std::string id, int packets, double p) {
    NodeSpec n;
    n.id = std::move(id);
    n.kind = NodeKind::satellite;
    n.packets = packets;
    n.success_prob = p;
    return n;
  }

  // Position a UAV occupies at slot 0.
  CellId initial_position() const {
    if (start_cell) return *start_cell;
    if (mobility.kind == MobilityKind::cyclic_route && !mobility.route.empty()) return mobility.route.front();
    return 0;
  }
};

/// Validates a roster against its graph and returns non-fatal warnings
/// (the IoT > UAV > satellite reliability ordering is advisory).
inline std::vector<std::string> validate_nodes(const CellGraph& graph, const std::vector<NodeSpec>& nodes) {
  std::vector<std::string> warnings;
  int satellites = 0;
  std::set<std::string> seen;
  for (const auto& n : nodes) {
    const std::string who = "node '" + n.id + "'";
    if (n.id.empty()) throw ConfigError("node id must not be empty");
    if (!seen.insert(n.id).second) throw ConfigError(who + " is listed twice");
    if (n.packets < 1) throw ConfigError(who + ": packet count l must be >= 1");
    if (!(n.success_prob > 0.0 && n.success_prob <= 1.0))
      throw ConfigError(who + ": success probability p must lie in (0, 1]");
    switch (n.kind) {
      case NodeKind::iot:
        if (!n.home_cell) throw ConfigError(who + ": IoT sensor needs home_cell");
        if (!graph.contains(*n.home_cell)) throw ConfigError(who + ": home_cell outside the graph");
        break;
      case NodeKind::uav: {
        if (n.radius < 0) throw ConfigError(who + ": radius must be non-negative");
        if (!graph.contains(n.initial_position())) throw ConfigError(who + ": start cell outside the graph");
        const auto& route = n.mobility.route;
        if (n.mobility.kind == MobilityKind::cyclic_route) {
          if (route.empty()) throw ConfigError(who + ": cyclic route is empty");
          for (CellId c : route)
            if (!graph.contains(c)) throw ConfigError(who + ": route visits unknown cell " + std::to_string(c));
          if (route.size() > 1)
            for (std::size_t i = 0; i < route.size(); ++i) {
              const CellId a = route[i];
              const CellId b = route[(i + 1) % route.size()];
              if (!graph.adjacent(a, b))
                throw ConfigError(who + ": route step " + std::to_string(a) + "->" + std::to_string(b) +
                                  " is not an edge");
            }
        }
        break;
      }
      case NodeKind::satellite:
        ++satellites;
        break;
    }
  }
  if (satellites > 1) throw ConfigError("at most one (logical) satellite node is allowed");

  double min_iot = 2.0, max_uav = -1.0, min_uav = 2.0, max_sat = -1.0;
  for (const auto& n : nodes) {
    if (n.kind == NodeKind::iot) min_iot = std::min(min_iot, n.success_prob);
    if (n.kind == NodeKind::uav) {
      max_uav = std::max(max_uav, n.success_prob);
      min_uav = std::min(min_uav, n.success_prob);
    }
    if (n.kind == NodeKind::satellite) max_sat = std::max(max_sat, n.success_prob);
  }
  if (max_uav >= 0.0 && min_iot <= 1.0 && !(min_iot > max_uav))
    warnings.emplace_back("reliability ordering p_IoT > p_UAV does not hold");
  if (max_sat >= 0.0 && min_uav <= 1.0 && !(min_uav > max_sat))
    warnings.emplace_back("reliability ordering p_UAV > p_sat does not hold");
  if (max_sat >= 0.0 && max_uav < 0.0 && min_iot <= 1.0 && !(min_iot > max_sat))
    warnings.emplace_back("reliability ordering p_IoT > p_sat does not hold");
  return warnings;
}

}  // namespace aoisat
