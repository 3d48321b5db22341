#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "aoisat/aoisat.hpp"

namespace aoisat::testing {

inline std::filesystem::path source_dir() { return AOISAT_SOURCE_DIR; }

inline std::vector<NodeSpec> ground_nodes() {
  std::vector<NodeSpec> nodes;
  for (CellId c : {0, 3, 6, 9, 12, 15}) nodes.push_back(NodeSpec::iot("s" + std::to_string(c), c, 2, 0.8));
  nodes.push_back(NodeSpec::uav("uav", 5, 1, 6, 0.8));
  return nodes;
}

inline Scenario ground_scenario() { return Scenario("ground", build_grid(4, 4), ground_nodes()); }

inline Scenario satellite_scenario(int l_sat = 20, double p_sat = 0.6, double lambda_a = 0.01,
                                   double lambda_u = 0.05) {
  auto nodes = ground_nodes();
  nodes.push_back(NodeSpec::satellite("sat", l_sat, p_sat));
  return Scenario("sat", build_grid(4, 4), std::move(nodes), AvailabilityProcess::geometric(lambda_a, lambda_u));
}

/// Half the slots to the satellite, the rest split evenly over the ground.
inline RandomizedPolicy half_satellite_policy() {
  std::vector<double> mu(8, 0.5 / 7.0);
  mu[7] = 0.5;
  return RandomizedPolicy{mu};
}

inline double relative_error(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace aoisat::testing
