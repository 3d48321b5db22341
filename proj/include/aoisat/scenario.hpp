#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aoisat/availability.hpp"
#include "aoisat/coverage.hpp"
#include "aoisat/graph.hpp"
#include "aoisat/node.hpp"

namespace aoisat {

/// A validated deployment: graph, node roster and (when a satellite node is
/// present) its availability process. Immutable once built.
class Scenario {
 public:
  Scenario() = default;

  Scenario(std::string id, CellGraph graph, std::vector<NodeSpec> nodes,
           std::optional<AvailabilityProcess> availability = std::nullopt)
      : id_(std::move(id)), graph_(std::move(graph)), nodes_(std::move(nodes)), availability_(std::move(availability)) {
    warnings_ = validate_nodes(graph_, nodes_);
    for (std::size_t k = 0; k < nodes_.size(); ++k)
      if (nodes_[k].kind == NodeKind::satellite) satellite_ = static_cast<NodeIndex>(k);
    if (satellite_ && !availability_)
      throw ConfigError("scenario '" + id_ + "' has a satellite node but no [satellite] availability model");
    table_ = CoverageTable(graph_, nodes_);
  }

  const std::string& id() const noexcept { return id_; }
  const CellGraph& graph() const noexcept { return graph_; }
  const std::vector<NodeSpec>& nodes() const noexcept { return nodes_; }
  const NodeSpec& node(NodeIndex k) const { return nodes_.at(static_cast<std::size_t>(k)); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t cell_count() const noexcept { return graph_.cell_count(); }
  const std::optional<AvailabilityProcess>& availability() const noexcept { return availability_; }
  std::optional<NodeIndex> satellite() const noexcept { return satellite_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  const CoverageTable& coverage_table() const noexcept { return table_; }

  std::optional<NodeIndex> find(const std::string& node_id) const {
    for (std::size_t k = 0; k < nodes_.size(); ++k)
      if (nodes_[k].id == node_id) return static_cast<NodeIndex>(k);
    return std::nullopt;
  }

  /// Same deployment with the satellite node removed (terrestrial only).
  Scenario without_satellite() const {
    std::vector<NodeSpec> kept;
    for (const auto& n : nodes_)
      if (n.kind != NodeKind::satellite) kept.push_back(n);
    return Scenario(id_ + "-nosat", graph_, std::move(kept));
  }

  Scenario with_nodes(std::vector<NodeSpec> nodes) const { return Scenario(id_, graph_, std::move(nodes), availability_); }

  Scenario with_availability(std::optional<AvailabilityProcess> availability) const {
    return Scenario(id_, graph_, nodes_, std::move(availability));
  }

  Scenario with_id(std::string id) const { return Scenario(std::move(id), graph_, nodes_, availability_); }

 private:
  std::string id_;
  CellGraph graph_;
  std::vector<NodeSpec> nodes_;
  std::optional<AvailabilityProcess> availability_;
  std::optional<NodeIndex> satellite_;
  std::vector<std::string> warnings_;
  CoverageTable table_;
};

}  // namespace aoisat
