#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "aoisat/error.hpp"

namespace aoisat {

using CellId = std::int32_t;

enum class Adjacency { four, eight };

/// Undirected, connected deployment graph with positive per-cell weights.
class CellGraph {
 public:
  CellGraph() = default;

  CellGraph(std::size_t cell_count, const std::vector<std::pair<CellId, CellId>>& edges,
            std::vector<double> weights = {})
      : adjacency_(cell_count), weights_(std::move(weights)) {
    if (cell_count == 0) throw ConfigError("graph must contain at least one cell");
    if (weights_.empty()) weights_.assign(cell_count, 1.0);
    if (weights_.size() != cell_count)
      throw ConfigError("weights list has " + std::to_string(weights_.size()) + " entries, expected " +
                        std::to_string(cell_count));
    for (double w : weights_)
      if (!(w > 0.0)) throw ConfigError("cell weights must be positive");

    for (auto [a, b] : edges) {
      check(a);
      check(b);
      if (a == b) throw ConfigError("self-loop on cell " + std::to_string(a));
      add_arc(a, b);
      add_arc(b, a);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
    if (!connected()) throw ConfigError("cell graph is not connected");
  }

  std::size_t cell_count() const noexcept { return adjacency_.size(); }

  std::size_t edge_count() const noexcept {
    std::size_t degree_sum = 0;
    for (const auto& nbrs : adjacency_) degree_sum += nbrs.size();
    return degree_sum / 2;
  }

  const std::vector<CellId>& neighbors(CellId cell) const {
    check_lookup(cell);
    return adjacency_[static_cast<std::size_t>(cell)];
  }

  bool adjacent(CellId a, CellId b) const {
    const auto& nbrs = neighbors(a);
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
  }

  CellGraph with_weights(std::vector<double> weights) const {
    std::vector<std::pair<CellId, CellId>> edges;
    for (std::size_t a = 0; a < adjacency_.size(); ++a)
      for (CellId b : adjacency_[a])
        if (static_cast<CellId>(a) < b) edges.emplace_back(static_cast<CellId>(a), b);
    return CellGraph(cell_count(), edges, std::move(weights));
  }

  const std::vector<double>& weights() const noexcept { return weights_; }
  double weight(CellId cell) const { return weights_.at(static_cast<std::size_t>(cell)); }

  double weight_sum() const noexcept {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
  }

  bool contains(CellId cell) const noexcept {
    return cell >= 0 && static_cast<std::size_t>(cell) < adjacency_.size();
  }

  /// Shortest-path hop distances from `source` to every cell.
  std::vector<int> distances_from(CellId source) const {
    check_lookup(source);
    std::vector<int> dist(cell_count(), -1);
    std::deque<CellId> frontier{source};
    dist[static_cast<std::size_t>(source)] = 0;
    while (!frontier.empty()) {
      const CellId u = frontier.front();
      frontier.pop_front();
      for (CellId v : adjacency_[static_cast<std::size_t>(u)]) {
        auto& dv = dist[static_cast<std::size_t>(v)];
        if (dv < 0) {
          dv = dist[static_cast<std::size_t>(u)] + 1;
          frontier.push_back(v);
        }
      }
    }
    return dist;
  }

 private:
  void check(CellId c) const {
    if (!contains(c)) throw ConfigError("edge references unknown cell " + std::to_string(c));
  }
  void check_lookup(CellId c) const {
    if (!contains(c)) throw LookupError("unknown cell id " + std::to_string(c));
  }
  void add_arc(CellId a, CellId b) {
    auto& nbrs = adjacency_[static_cast<std::size_t>(a)];
    if (std::find(nbrs.begin(), nbrs.end(), b) == nbrs.end()) nbrs.push_back(b);
  }
  bool connected() const {
    const auto dist = distances_from(0);
    return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
  }

  std::vector<std::vector<CellId>> adjacency_;
  std::vector<double> weights_;
};

/// Row-major grid; cell id = row * cols + col. Unit weights.
inline CellGraph build_grid(int rows, int cols, Adjacency adjacency = Adjacency::four) {
  if (rows <= 0 || cols <= 0) throw ConfigError("grid dimensions must be positive");
  std::vector<std::pair<CellId, CellId>> edges;
  const auto id = [cols](int r, int c) { return static_cast<CellId>(r * cols + c); };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows) edges.emplace_back(id(r, c), id(r + 1, c));
      if (adjacency == Adjacency::eight && r + 1 < rows) {
        if (c + 1 < cols) edges.emplace_back(id(r, c), id(r + 1, c + 1));
        if (c > 0) edges.emplace_back(id(r, c), id(r + 1, c - 1));
      }
    }
  }
  return CellGraph(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), edges);
}

/// Cells within `radius` hops of `cell`, the cell itself included, ascending.
inline std::vector<CellId> neighborhood(const CellGraph& graph, CellId cell, int radius) {
  if (radius < 0) throw ContractError("neighborhood radius must be non-negative");
  const auto dist = graph.distances_from(cell);
  std::vector<CellId> out;
  for (std::size_t m = 0; m < dist.size(); ++m)
    if (dist[m] >= 0 && dist[m] <= radius) out.push_back(static_cast<CellId>(m));
  return out;
}

}  // namespace aoisat
