#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aoisat/error.hpp"
#include "aoisat/graph.hpp"
#include "aoisat/node.hpp"
#include "aoisat/rng.hpp"
#include "aoisat/scenario.hpp"

namespace aoisat {

/// What a selector sees at a scheduling epoch (channel idle).
struct SelectionContext {
  std::span<const std::int64_t> ages;              // A_m(t)
  std::span<const double> weights;                 // alpha_m
  std::span<const NodeSpec> nodes;
  std::span<const std::span<const CellId>> refresh;  // M_t(k); empty for an unavailable satellite
  bool sat_available = false;
  std::optional<NodeIndex> satellite;
};

inline bool eligible(const SelectionContext& ctx, NodeIndex k) {
  return !(ctx.satellite && k == *ctx.satellite && !ctx.sat_available);
}

// ---------------------------------------------------------------------------
// Stationary randomized

enum class UnavailableBehavior { idle, renormalize };

struct RandomizedPolicy {
  std::vector<double> access;                     // mu_k, used whenever the satellite is available
  std::optional<std::vector<double>> u_period;    // optional distribution while M(t) = 0
  UnavailableBehavior unavailable = UnavailableBehavior::renormalize;

  /// Effective per-node probabilities for the given availability state.
  std::vector<double> effective(bool sat_available, std::optional<NodeIndex> satellite) const {
    if (sat_available || !satellite) return access;
    if (u_period) return *u_period;
    std::vector<double> mu = access;
    const auto s = static_cast<std::size_t>(*satellite);
    const double sat_mass = mu[s];
    mu[s] = 0.0;
    if (unavailable == UnavailableBehavior::renormalize) {
      double terrestrial = 0.0;
      for (double m : mu) terrestrial += m;
      if (terrestrial > 0.0)
        for (double& m : mu) m += sat_mass * m / terrestrial;
    }
    return mu;
  }
};

inline void check_distribution(std::span<const double> mu, std::size_t nodes, const char* what) {
  if (mu.size() != nodes)
    throw ConfigError(std::string(what) + " has " + std::to_string(mu.size()) + " entries for " +
                      std::to_string(nodes) + " nodes");
  double total = 0.0;
  for (double m : mu) {
    if (!(m >= 0.0 && m <= 1.0)) throw ConfigError(std::string(what) + " entries must lie in [0, 1]");
    total += m;
  }
  if (total > 1.0 + 1e-9) throw ConfigError(std::string(what) + " sums to " + std::to_string(total) + " > 1");
}

inline void validate(const RandomizedPolicy& policy, const Scenario& scenario) {
  check_distribution(policy.access, scenario.node_count(), "access probabilities");
  if (policy.u_period) {
    check_distribution(*policy.u_period, scenario.node_count(), "u-period probabilities");
    if (auto s = scenario.satellite(); s && (*policy.u_period)[static_cast<std::size_t>(*s)] != 0.0)
      throw ConfigError("u-period probabilities must give the satellite zero mass");
  }
}

/// Draws the node that initiates at an idle slot, or nullopt for an idle slot.
inline std::optional<NodeIndex> sample_randomized(const RandomizedPolicy& policy, bool sat_available,
                                                  std::optional<NodeIndex> satellite, Rng& rng) {
  const double u = rng.uniform();
  const bool use_access = sat_available || !satellite;
  double cumulative = 0.0;
  if (use_access || (!policy.u_period && policy.unavailable == UnavailableBehavior::idle)) {
    for (std::size_t k = 0; k < policy.access.size(); ++k) {
      cumulative += policy.access[k];
      if (u < cumulative) {
        if (!use_access && static_cast<NodeIndex>(k) == *satellite) return std::nullopt;
        return static_cast<NodeIndex>(k);
      }
    }
    return std::nullopt;
  }
  const auto mu = policy.effective(false, satellite);
  for (std::size_t k = 0; k < mu.size(); ++k) {
    cumulative += mu[k];
    if (u < cumulative) return static_cast<NodeIndex>(k);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Max-weight with throughput-debt virtual queues

struct MaxWeightState {
  std::vector<double> targets;  // nu-bar_k, per epoch
  std::vector<double> debts;    // x_k, signed
  double beta = 1.0;
  bool allow_idle = false;
  std::int64_t epoch = 0;

  MaxWeightState() = default;
  MaxWeightState(std::vector<double> nu_bar, double beta_, bool allow_idle_ = false)
      : targets(std::move(nu_bar)), debts(targets.size(), 0.0), beta(beta_), allow_idle(allow_idle_) {}
};

inline void validate(const MaxWeightState& mw, const Scenario& scenario) {
  if (mw.targets.size() != scenario.node_count())
    throw ConfigError("max-weight targets have " + std::to_string(mw.targets.size()) + " entries for " +
                      std::to_string(scenario.node_count()) + " nodes");
  if (mw.debts.size() != mw.targets.size()) throw ConfigError("max-weight debt vector size mismatch");
  if (!(mw.beta > 0.0)) throw ConfigError("max-weight beta must be positive");
  for (double v : mw.targets)
    if (!(v >= 0.0)) throw ConfigError("max-weight targets must be non-negative");
}

/// Drift-bound weight C_k for node k at the current epoch.
inline double max_weight_score(const SelectionContext& ctx, const MaxWeightState& mw, NodeIndex k) {
  const auto& node = ctx.nodes[static_cast<std::size_t>(k)];
  const double p = node.success_prob;
  const double l = node.packets;
  double all = 0.0, alpha_sum = 0.0;
  for (std::size_t m = 0; m < ctx.ages.size(); ++m) {
    all += ctx.weights[m] * static_cast<double>(ctx.ages[m]);
    alpha_sum += ctx.weights[m];
  }
  double covered_linear = 0.0, covered_quadratic = 0.0;
  for (CellId m : ctx.refresh[static_cast<std::size_t>(k)]) {
    const double a = static_cast<double>(ctx.ages[static_cast<std::size_t>(m)]);
    const double w = ctx.weights[static_cast<std::size_t>(m)];
    covered_linear += w * a;
    covered_quadratic += w * a * (a + 2.0 - 2.0 / p);
  }
  const double debt = std::max(mw.debts[static_cast<std::size_t>(k)], 0.0);
  return mw.beta * p * debt + p * covered_quadratic - 2.0 * l * (all - covered_linear) -
         (l * (l + p - 1.0) / p) * alpha_sum;
}

inline std::optional<NodeIndex> max_weight_select(const SelectionContext& ctx, const MaxWeightState& mw) {
  std::optional<NodeIndex> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ctx.nodes.size(); ++k) {
    const auto idx = static_cast<NodeIndex>(k);
    if (!eligible(ctx, idx)) continue;
    const double c = max_weight_score(ctx, mw, idx);
    if (!best || c > best_score) {
      best = idx;
      best_score = c;
    }
  }
  if (best && mw.allow_idle && best_score < 0.0) return std::nullopt;
  return best;
}

/// Epoch-end debt bookkeeping: x_k += nu-bar_k for all k, minus one for a delivery.
inline void update_debts(MaxWeightState& mw, std::optional<NodeIndex> scheduled, bool delivered) {
  for (std::size_t k = 0; k < mw.debts.size(); ++k) mw.debts[k] += mw.targets[k];
  if (scheduled && delivered) mw.debts[static_cast<std::size_t>(*scheduled)] -= 1.0;
  ++mw.epoch;
}

// ---------------------------------------------------------------------------
// Baselines

struct GreedyPolicy {};
struct Mwl1Policy {};

template <typename Score>
std::optional<NodeIndex> argmax_nonempty(const SelectionContext& ctx, Score score) {
  std::optional<NodeIndex> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ctx.nodes.size(); ++k) {
    const auto idx = static_cast<NodeIndex>(k);
    if (!eligible(ctx, idx) || ctx.refresh[k].empty()) continue;
    const double s = score(k);
    if (!best || s > best_score) {
      best = idx;
      best_score = s;
    }
  }
  return best;
}

/// argmax_k sum_{m in M_k} alpha_m A_m.
inline std::optional<NodeIndex> greedy_select(const SelectionContext& ctx) {
  return argmax_nonempty(ctx, [&](std::size_t k) {
    double s = 0.0;
    for (CellId m : ctx.refresh[k])
      s += ctx.weights[static_cast<std::size_t>(m)] * static_cast<double>(ctx.ages[static_cast<std::size_t>(m)]);
    return s;
  });
}

/// argmax_k sqrt(p_k) sum_{m in M_k} sqrt(alpha_m) A_m.
inline std::optional<NodeIndex> mwl1_select(const SelectionContext& ctx) {
  return argmax_nonempty(ctx, [&](std::size_t k) {
    double s = 0.0;
    for (CellId m : ctx.refresh[k])
      s += std::sqrt(ctx.weights[static_cast<std::size_t>(m)]) *
           static_cast<double>(ctx.ages[static_cast<std::size_t>(m)]);
    return std::sqrt(ctx.nodes[k].success_prob) * s;
  });
}

// ---------------------------------------------------------------------------
// Uniform policy handle used by the simulator

using Policy = std::variant<RandomizedPolicy, MaxWeightState, GreedyPolicy, Mwl1Policy>;

inline std::string_view policy_name(const Policy& policy) {
  struct Visitor {
    std::string_view operator()(const RandomizedPolicy&) const { return "sr"; }
    std::string_view operator()(const MaxWeightState&) const { return "mw"; }
    std::string_view operator()(const GreedyPolicy&) const { return "greedy"; }
    std::string_view operator()(const Mwl1Policy&) const { return "mwl1"; }
  };
  return std::visit(Visitor{}, policy);
}

inline void validate(const Policy& policy, const Scenario& scenario) {
  if (const auto* sr = std::get_if<RandomizedPolicy>(&policy)) validate(*sr, scenario);
  if (const auto* mw = std::get_if<MaxWeightState>(&policy)) validate(*mw, scenario);
}

inline std::optional<NodeIndex> select(Policy& policy, const SelectionContext& ctx, Rng& rng) {
  struct Visitor {
    const SelectionContext& ctx;
    Rng& rng;
    std::optional<NodeIndex> operator()(RandomizedPolicy& p) const {
      return sample_randomized(p, ctx.sat_available, ctx.satellite, rng);
    }
    std::optional<NodeIndex> operator()(MaxWeightState& mw) const { return max_weight_select(ctx, mw); }
    std::optional<NodeIndex> operator()(GreedyPolicy&) const { return greedy_select(ctx); }
    std::optional<NodeIndex> operator()(Mwl1Policy&) const { return mwl1_select(ctx); }
  };
  return std::visit(Visitor{ctx, rng}, policy);
}

inline void on_epoch_end(Policy& policy, std::optional<NodeIndex> scheduled, bool delivered) {
  if (auto* mw = std::get_if<MaxWeightState>(&policy)) update_debts(*mw, scheduled, delivered);
}

}  // namespace aoisat
