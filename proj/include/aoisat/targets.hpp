#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "aoisat/coverage.hpp"
#include "aoisat/error.hpp"
#include "aoisat/node.hpp"

namespace aoisat {

struct ThroughputTargets {
  std::vector<double> nu;  // nu-bar_k
  double slack = 0.0;      // 1 - sum_k l_k nu_k / p_k
  int iterations = 0;
  bool closed_form = false;
};

inline double budget_usage(std::span<const NodeSpec> nodes, std::span<const double> nu) {
  double used = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) used += nodes[k].packets * nu[k] / nodes[k].success_prob;
  return used;
}

/// sum_m alpha_m / sum_k nu_k f_{m,k}; +inf if some cell gets no rate.
inline double target_objective(std::span<const double> weights, const CoverageMatrix& f, std::span<const double> nu) {
  double total = 0.0;
  for (std::size_t m = 0; m < f.cells(); ++m) {
    double rate = 0.0;
    for (std::size_t k = 0; k < f.nodes(); ++k) rate += nu[k] * f.at(m, k);
    if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
    total += weights[m] / rate;
  }
  return total;
}

/// If every node covers exactly one cell with f = 1 and every cell is
/// covered by exactly one node, returns the node -> cell assignment.
inline std::optional<std::vector<std::size_t>> unique_coverage(const CoverageMatrix& f) {
  std::vector<std::size_t> cell_of(f.nodes(), f.cells());
  std::vector<int> cover_count(f.cells(), 0);
  for (std::size_t k = 0; k < f.nodes(); ++k) {
    for (std::size_t m = 0; m < f.cells(); ++m) {
      const double v = f.at(m, k);
      if (v == 0.0) continue;
      if (v != 1.0 || cell_of[k] != f.cells()) return std::nullopt;
      cell_of[k] = m;
      ++cover_count[m];
    }
    if (cell_of[k] == f.cells()) return std::nullopt;
  }
  for (int c : cover_count)
    if (c != 1) return std::nullopt;
  return cell_of;
}

/// KKT solution for unique coverage:
/// nu_k = sqrt(alpha_k p_k / l_k) / sum_j sqrt(alpha_j l_j / p_j).
inline ThroughputTargets closed_form_targets(std::span<const NodeSpec> nodes, std::span<const double> node_weights) {
  double denom = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j)
    denom += std::sqrt(node_weights[j] * nodes[j].packets / nodes[j].success_prob);
  ThroughputTargets out;
  out.closed_form = true;
  out.nu.resize(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k)
    out.nu[k] = std::sqrt(node_weights[k] * nodes[k].success_prob / nodes[k].packets) / denom;
  out.slack = 1.0 - budget_usage(nodes, out.nu);
  return out;
}

/// Euclidean projection onto {w >= 0, sum w = 1}.
inline std::vector<double> project_to_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumulative += u[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  for (auto& x : v) x = std::max(x - theta, 0.0);
  return v;
}

struct SolverOptions {
  double tolerance = 1e-14;  // relative objective change
  int max_iterations = 200000;
};

inline void require_reachable(const CoverageMatrix& f) {
  for (std::size_t m = 0; m < f.cells(); ++m)
    if (!(f.row_sum(m) > 0.0))
      throw InfeasibleError("cell " + std::to_string(m) + " is not covered by any node");
}

/// Projected gradient (Barzilai-Borwein steps, Armijo backtracking) on the
/// budget-share simplex w_k = l_k nu_k / p_k. The objective is decreasing in
/// every nu_k, so the optimum uses the whole budget.
inline ThroughputTargets solve_targets_numeric(std::span<const NodeSpec> nodes, std::span<const double> weights,
                                               const CoverageMatrix& f, SolverOptions options = {}) {
  require_reachable(f);
  const std::size_t n = nodes.size();
  std::vector<double> scale(n);  // nu_k = scale_k * w_k
  for (std::size_t k = 0; k < n; ++k) scale[k] = nodes[k].success_prob / nodes[k].packets;

  const auto to_nu = [&](const std::vector<double>& w) {
    std::vector<double> nu(n);
    for (std::size_t k = 0; k < n; ++k) nu[k] = scale[k] * w[k];
    return nu;
  };
  const auto objective = [&](const std::vector<double>& w) { return target_objective(weights, f, to_nu(w)); };
  const auto gradient = [&](const std::vector<double>& w) {
    const auto nu = to_nu(w);
    std::vector<double> g(n, 0.0);
    for (std::size_t m = 0; m < f.cells(); ++m) {
      double rate = 0.0;
      for (std::size_t k = 0; k < n; ++k) rate += nu[k] * f.at(m, k);
      const double c = weights[m] / (rate * rate);
      for (std::size_t k = 0; k < n; ++k) g[k] -= c * f.at(m, k) * scale[k];
    }
    return g;
  };

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  double value = objective(w);
  auto g = gradient(w);
  double step = 1.0;
  {
    double gmax = 0.0;
    for (double x : g) gmax = std::max(gmax, std::abs(x));
    if (gmax > 0.0) step = 1.0 / gmax;
  }

  ThroughputTargets out;
  int stalls = 0;
  for (int it = 0; it < options.max_iterations; ++it) {
    out.iterations = it + 1;
    std::vector<double> trial(n);
    for (std::size_t k = 0; k < n; ++k) trial[k] = w[k] - step * g[k];
    trial = project_to_simplex(std::move(trial));
    std::vector<double> d(n);
    double slope = 0.0, dnorm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      d[k] = trial[k] - w[k];
      slope += g[k] * d[k];
      dnorm = std::max(dnorm, std::abs(d[k]));
    }
    if (dnorm < 1e-16) break;

    double lambda = 1.0;
    std::vector<double> next(n);
    double next_value = value;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t k = 0; k < n; ++k) next[k] = w[k] + lambda * d[k];
      next_value = objective(next);
      if (next_value <= value + 1e-4 * lambda * slope) break;
      lambda *= 0.5;
    }
    if (!(next_value <= value)) break;

    const auto next_g = gradient(next);
    double ss = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = next[k] - w[k];
      const double y = next_g[k] - g[k];
      ss += s * s;
      sy += s * y;
    }
    step = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : step * 2.0;

    const double change = std::abs(value - next_value) / std::max(std::abs(value), 1e-300);
    w = std::move(next);
    g = next_g;
    value = next_value;
    // BB steps are non-monotone in the step length; require a few quiet
    // iterations in a row before declaring convergence.
    stalls = change < options.tolerance ? stalls + 1 : 0;
    if (stalls >= 5) break;
  }
  out.nu = to_nu(w);
  out.slack = 1.0 - budget_usage(nodes, out.nu);
  return out;
}

/// Target throughputs minimizing sum_m alpha_m / sum_k nu_k f_{m,k} under
/// the channel budget. Uses the closed form when coverage is one-to-one.
inline ThroughputTargets solve_targets(std::span<const NodeSpec> nodes, std::span<const double> weights,
                                       const CoverageMatrix& f, SolverOptions options = {}) {
  require_reachable(f);
  if (auto assignment = unique_coverage(f)) {
    std::vector<double> node_weights(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) node_weights[k] = weights[(*assignment)[k]];
    return closed_form_targets(nodes, node_weights);
  }
  return solve_targets_numeric(nodes, weights, f, options);
}

/// Stationary randomized access probabilities whose per-node success rates
/// are proportional to the given targets: mu_k ∝ nu_k / p_k, summing to one.
inline std::vector<double> access_from_targets(std::span<const NodeSpec> nodes, std::span<const double> nu) {
  std::vector<double> mu(nodes.size());
  double total = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) total += mu[k] = nu[k] / nodes[k].success_prob;
  if (!(total > 0.0)) throw InfeasibleError("all throughput targets are zero");
  for (auto& m : mu) m /= total;
  return mu;
}

}  // namespace aoisat
