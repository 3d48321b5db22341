#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aoisat/coverage.hpp"
#include "aoisat/error.hpp"
#include "aoisat/node.hpp"
#include "aoisat/sim.hpp"

namespace aoisat {

// ---------------------------------------------------------------------------
// Service-time building blocks

struct Moments {
  double mean = 0.0;
  double second_moment = 0.0;
};

/// Slots needed for the l-1 packets after the first: NB(l-1, p) trials.
inline Moments nb_service_moments(int l, double p) {
  if (l < 1) throw ContractError("packet count must be >= 1");
  if (!(p > 0.0 && p <= 1.0)) throw ContractError("success probability must lie in (0, 1]");
  const double r = l - 1;
  return {r / p, r * (l - p) / (p * p)};
}

/// Channel blocking time of a scheduled node that does not cover the cell.
inline Moments blocking_moments(int l, double p) {
  const auto s = nb_service_moments(l, p);
  return {static_cast<double>(l), 2.0 * l - 1.0 + s.second_moment * p};
}

/// E[q^L] for the channel-holding length L of one epoch given to a
/// terrestrial node: one slot on a failed first packet, 1 + NB(l-1, p) otherwise.
inline double psi(double q, int l, double p) {
  if (!(q > 0.0 && q <= 1.0)) throw ContractError("psi argument must lie in (0, 1]");
  if (l < 1) throw ContractError("packet count must be >= 1");
  if (!((1.0 - p) * q < 1.0)) throw ContractError("psi requires (1-p) q < 1");
  return q * (1.0 - p + p * std::pow(p * q / (1.0 - (1.0 - p) * q), l - 1));
}

// ---------------------------------------------------------------------------
// Peak AoI reports

struct CellPeak {
  double rate = 0.0;  // B_m or C_m
  double mean_service = 0.0;
  double mean_wait = 0.0;
  double service_second = 0.0;
  double wait_second = 0.0;
  double peak = 0.0;  // 2 E[S] + E[W] + 1
};

struct PeakAoiReport {
  std::vector<CellPeak> cells;
  double ewspaoi = 0.0;  // (1/|V|) sum alpha_m peak_m
};

// appendix: the derived forms, checked against Monte Carlo. strict: the
// closed forms exactly as printed, kept for comparison.
enum class FormulaMode { appendix, strict };

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ContractError(std::string(what) + ": size mismatch");
}

/// Terrestrial part of the first-passage recursion. probs are the per-epoch
/// selection probabilities; the satellite column is skipped when given.
struct FirstPassageTerms {
  double rate = 0.0;
  double service = 0.0;
  double service_second = 0.0;
  double wait_numerator = 1.0;
};

inline FirstPassageTerms terrestrial_terms(std::span<const NodeSpec> nodes, std::span<const double> probs,
                                           const CoverageMatrix& f, std::size_t m,
                                           std::optional<NodeIndex> skip = std::nullopt) {
  FirstPassageTerms out;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (skip && static_cast<NodeIndex>(k) == *skip) continue;
    const auto& n = nodes[k];
    const double fk = f.at(m, k);
    const double mu = probs[k];
    out.rate += mu * n.success_prob * fk;
    out.service += mu * fk * (n.packets - 1);
    out.service_second += mu * fk * (n.packets - 1) * (n.packets - n.success_prob) / n.success_prob;
    out.wait_numerator += mu * (1.0 - fk) * (n.packets - 1);
  }
  return out;
}

/// Terrestrial contributions to the E[W^2] first-passage recursion.
inline double terrestrial_wait_second(std::span<const NodeSpec> nodes, std::span<const double> probs,
                                      const CoverageMatrix& f, std::size_t m, double mean_wait,
                                      std::optional<NodeIndex> skip = std::nullopt) {
  double acc = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (skip && static_cast<NodeIndex>(k) == *skip) continue;
    const auto& n = nodes[k];
    const double fk = f.at(m, k);
    const auto y = blocking_moments(n.packets, n.success_prob);
    acc += probs[k] * fk * (1.0 + 2.0 * (1.0 - n.success_prob) * mean_wait);
    acc += probs[k] * (1.0 - fk) * (y.second_moment + 2.0 * n.packets * mean_wait);
  }
  return acc;
}

struct NoSatOptions {
  FormulaMode mode = FormulaMode::appendix;  // strict: +1 outside the weighted sum
};

/// EWSPAoI of a stationary randomized policy without satellite support.
inline PeakAoiReport ewspaoi_no_sat(std::span<const NodeSpec> nodes, std::span<const double> weights,
                                    std::span<const double> mu, const CoverageMatrix& f, NoSatOptions options = {}) {
  require_same_size(nodes.size(), mu.size(), "access probabilities");
  require_same_size(nodes.size(), f.nodes(), "coverage columns");
  require_same_size(weights.size(), f.cells(), "cell weights");
  double total = 0.0;
  for (double m : mu) total += m;
  if (total > 1.0 + 1e-9) throw ConfigError("access probabilities sum to more than 1");

  PeakAoiReport out;
  out.cells.resize(f.cells());
  double sum = 0.0;
  for (std::size_t m = 0; m < f.cells(); ++m) {
    const auto t = terrestrial_terms(nodes, mu, f, m);
    if (!(t.rate > 0.0)) throw InfeasibleError("cell " + std::to_string(m) + " is never updated (B = 0)");
    auto& c = out.cells[m];
    c.rate = t.rate;
    c.mean_service = t.service / t.rate;
    c.service_second = t.service_second / t.rate;
    c.mean_wait = t.wait_numerator / t.rate;
    c.wait_second = (terrestrial_wait_second(nodes, mu, f, m, c.mean_wait) + (1.0 - total) * (1.0 + 2.0 * c.mean_wait)) /
                    t.rate;
    c.peak = 2.0 * c.mean_service + c.mean_wait + 1.0;
    sum += weights[m] * (options.mode == FormulaMode::strict ? c.peak - 1.0 : c.peak);
  }
  out.ewspaoi = sum / static_cast<double>(f.cells());
  if (options.mode == FormulaMode::strict) out.ewspaoi += 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// Satellite quantities

inline void check_satellite_args(double p_sat, double lambda_a, int l_sat) {
  if (!(p_sat > 0.0 && p_sat <= 1.0)) throw ContractError("satellite success probability must lie in (0, 1]");
  if (!(lambda_a > 0.0 && lambda_a < 1.0)) throw ContractError("lambda_A must lie in (0, 1)");
  if (l_sat < 1) throw ContractError("satellite packet count must be >= 1");
}

/// Probability that the l_sat - 1 remaining packets finish inside the
/// availability window. appendix: P(S_sat <= T_A) with T_A on {1, 2, ...};
/// strict: the printed form without the 1/(1 - lambda_A) factor.
inline double sat_gamma(double p_sat, double lambda_a, int l_sat, FormulaMode mode = FormulaMode::appendix) {
  check_satellite_args(p_sat, lambda_a, l_sat);
  if (l_sat == 1) return 1.0;
  const double x = p_sat * (1.0 - lambda_a) / (p_sat + lambda_a - p_sat * lambda_a);
  const double g = std::pow(x, l_sat - 1);
  return mode == FormulaMode::appendix ? g / (1.0 - lambda_a) : g;
}

/// Mean satellite service after the first packet, given completion.
inline double sat_conditional_service(double p_sat, double lambda_a, int l_sat) {
  return (l_sat - 1) / (p_sat + lambda_a - p_sat * lambda_a);
}

inline double sat_conditional_service_second(double p_sat, double lambda_a, int l_sat) {
  const double d = p_sat + lambda_a - p_sat * lambda_a;
  return (l_sat - 1) * (l_sat - d) / (d * d);
}

/// Fraction of scheduling epochs that start while the satellite is available.
/// access: distribution used in A-periods (all nodes); u_period: distribution
/// used in U-periods (satellite entry ignored).
inline double sat_beta(std::span<const NodeSpec> nodes, std::span<const double> access,
                       std::span<const double> u_period, NodeIndex satellite, double lambda_a, double lambda_u) {
  require_same_size(nodes.size(), access.size(), "access probabilities");
  require_same_size(nodes.size(), u_period.size(), "u-period probabilities");
  double da = 0.0, du = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto& n = nodes[k];
    da += access[k] * psi(1.0 - lambda_a, n.packets, n.success_prob);
    if (static_cast<NodeIndex>(k) != satellite) du += u_period[k] * psi(1.0 - lambda_u, n.packets, n.success_prob);
  }
  const double num = da * (1.0 - du);
  const double den = num + du * (1.0 - da);
  if (!(den > 0.0)) throw NumericError("epoch-availability fraction is degenerate (D_A, D_U at the boundary)");
  return num / den;
}

struct WastedTime {
  double mean = 0.0;
  double second_moment = 0.0;
  std::int64_t terms = 0;
};

struct SeriesOptions {
  double tolerance = 1e-12;
  std::int64_t max_terms = 10'000'000;
};

/// Slots a satellite update holds the channel after its first packet before
/// availability ends, conditioned on that interruption. Sums the availability
/// pmf against the negative-binomial survival P(S_sat > k), which is tracked
/// as a binomial cdf P(Bin(k, p) < l - 1) updated term by term.
inline WastedTime sat_wasted_time(double p_sat, double lambda_a, int l_sat, FormulaMode mode = FormulaMode::appendix,
                                  SeriesOptions options = {}) {
  check_satellite_args(p_sat, lambda_a, l_sat);
  WastedTime out;
  if (l_sat == 1) return out;
  const int needed = l_sat - 1;
  const double q = 1.0 - p_sat;
  const double stay = 1.0 - lambda_a;

  std::vector<double> binom(static_cast<std::size_t>(needed), 0.0);  // P(Bin(k, p) = j), j < needed
  binom[0] = 1.0;                                                        // k = 0
  double survival = 1.0;                                                 // P(S_sat > 0)
  double decay = 1.0;                                                    // stay^k
  double num1 = 0.0, num2 = 0.0, den = 0.0;
  // appendix: weight lambda stay^(k-1), k >= 1. strict: weight lambda stay^k,
  // numerator from k = 0, denominator from k = 1, then +1.
  for (std::int64_t k = 0;; ++k) {
    if (k > options.max_terms)
      throw NumericError("wasted-time series did not converge within " + std::to_string(options.max_terms) +
                         " terms (p=" + std::to_string(p_sat) + ", lambda_A=" + std::to_string(lambda_a) +
                         ", l=" + std::to_string(l_sat) + ")");
    if (k >= 1) {
      for (std::size_t j = binom.size() - 1; j > 0; --j) binom[j] = q * binom[j] + p_sat * binom[j - 1];
      binom[0] *= q;
      survival = 0.0;
      for (double b : binom) survival += b;
      const double kd = static_cast<double>(k);
      const double w = mode == FormulaMode::appendix ? lambda_a * decay : lambda_a * decay * stay;
      num1 += kd * w * survival;
      num2 += kd * kd * w * survival;
      den += w * survival;
      decay *= stay;
      out.terms = k;
      // Remaining mass: survival is non-increasing, so the tail is bounded by
      // survival times the tail of sum j^2 lambda stay^(j-1) over j > k.
      const double tail = survival * decay * (kd * kd + 2.0 * kd / lambda_a + (2.0 - lambda_a) / (lambda_a * lambda_a));
      if (tail < options.tolerance) break;
    }
  }
  if (!(den > 0.0)) throw NumericError("wasted-time normalizer vanished");
  out.mean = num1 / den;
  out.second_moment = num2 / den;
  if (mode == FormulaMode::strict) {
    out.second_moment += 2.0 * out.mean + 1.0;
    out.mean += 1.0;
  }
  return out;
}

struct SatelliteInputs {
  std::span<const NodeSpec> nodes;
  std::span<const double> weights;
  std::span<const double> access;    // A-period distribution, satellite included
  std::span<const double> u_period;  // U-period distribution, satellite entry 0
  const CoverageMatrix* coverage = nullptr;
  NodeIndex satellite = 0;
  double lambda_a = 0.0;
  double lambda_u = 0.0;
};

struct SatelliteOptions {
  FormulaMode mode = FormulaMode::appendix;
  // Add E[T_U] = 1/lambda_U of pure waiting after a failed satellite update.
  // Off by default: U-period epochs already enter through the beta mixture.
  bool unavailable_dwell = false;
  SeriesOptions series{};
};

struct SatelliteReport {
  PeakAoiReport peak;
  double gamma = 0.0;
  double beta = 0.0;
  double d_a = 0.0;
  double d_u = 0.0;
  WastedTime wasted;
  double availability = 0.0;       // lambda_U / (lambda_A + lambda_U)
  std::vector<double> epoch_probs;  // per-epoch selection probabilities used
};

/// EWSPAoI of a stationary randomized policy with an intermittently available
/// satellite.
///
/// appendix mode treats each scheduling epoch as drawn from the A-period
/// distribution with probability beta and from the U-period distribution
/// otherwise; gamma and E[X_w] use the derived forms. strict mode evaluates
/// the printed closed form: raw access probabilities for terrestrial nodes, D_U over those same
/// probabilities, the shorter gamma and E[X_w], no dwell, and +1 outside the sum.
inline SatelliteReport ewspaoi_with_sat(const SatelliteInputs& in, SatelliteOptions options = {}) {
  if (!in.coverage) throw ContractError("coverage matrix required");
  const auto& f = *in.coverage;
  const auto& nodes = in.nodes;
  require_same_size(nodes.size(), in.access.size(), "access probabilities");
  require_same_size(nodes.size(), in.u_period.size(), "u-period probabilities");
  require_same_size(nodes.size(), f.nodes(), "coverage columns");
  require_same_size(in.weights.size(), f.cells(), "cell weights");
  if (!(in.lambda_u > 0.0 && in.lambda_u <= 1.0)) throw ContractError("lambda_U must lie in (0, 1]");
  const auto s = static_cast<std::size_t>(in.satellite);
  const auto& sat = nodes[s];
  const bool strict = options.mode == FormulaMode::strict;

  SatelliteReport out;
  out.availability = in.lambda_u / (in.lambda_a + in.lambda_u);
  out.gamma = sat_gamma(sat.success_prob, in.lambda_a, sat.packets, options.mode);
  out.wasted = sat_wasted_time(sat.success_prob, in.lambda_a, sat.packets, options.mode, options.series);

  std::vector<double> u_dist(in.u_period.begin(), in.u_period.end());
  if (strict) {
    u_dist.assign(in.access.begin(), in.access.end());
  }
  u_dist[s] = 0.0;
  out.beta = sat_beta(nodes, in.access, u_dist, in.satellite, in.lambda_a, in.lambda_u);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    out.d_a += in.access[k] * psi(1.0 - in.lambda_a, nodes[k].packets, nodes[k].success_prob);
    if (k != s) out.d_u += u_dist[k] * psi(1.0 - in.lambda_u, nodes[k].packets, nodes[k].success_prob);
  }

  out.epoch_probs.assign(nodes.size(), 0.0);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (k == s)
      out.epoch_probs[k] = out.beta * in.access[k];
    else
      out.epoch_probs[k] = strict ? in.access[k] : out.beta * in.access[k] + (1.0 - out.beta) * in.u_period[k];
  }
  double selected = 0.0;
  for (double v : out.epoch_probs) selected += v;
  const double idle = std::max(0.0, 1.0 - selected);

  const double sat_weight = out.epoch_probs[s] * sat.success_prob;
  const double sat_service = sat_conditional_service(sat.success_prob, in.lambda_a, sat.packets);
  const double sat_service2 = sat_conditional_service_second(sat.success_prob, in.lambda_a, sat.packets);
  const double dwell = options.unavailable_dwell && !strict ? 1.0 / in.lambda_u : 0.0;
  const double lost = out.wasted.mean + dwell;

  auto& report = out.peak;
  report.cells.resize(f.cells());
  double sum = 0.0;
  for (std::size_t m = 0; m < f.cells(); ++m) {
    const auto t = terrestrial_terms(nodes, out.epoch_probs, f, m, in.satellite);
    const double rate = t.rate + sat_weight * out.gamma;
    if (!(rate > 0.0)) throw InfeasibleError("cell " + std::to_string(m) + " is never updated (C = 0)");
    auto& c = report.cells[m];
    c.rate = rate;
    c.mean_service = (t.service + sat_weight * out.gamma * sat_service) / rate;
    c.service_second = (t.service_second + sat_weight * out.gamma * sat_service2) / rate;
    c.mean_wait = (t.wait_numerator + sat_weight * (1.0 - out.gamma) * lost) / rate;

    const double ew = c.mean_wait;
    const double xw = out.wasted.mean, xw2 = out.wasted.second_moment;
    double w2 = terrestrial_wait_second(nodes, out.epoch_probs, f, m, ew, in.satellite);
    w2 += (idle + out.epoch_probs[s] * (1.0 - sat.success_prob)) * (1.0 + 2.0 * ew);
    // E[(1 + X + T + W)^2] - E[W^2], T ~ geom(lambda_U) on {1, 2, ...}
    double failed = xw2 + 2.0 * xw * ew + 2.0 * xw + 2.0 * ew + 1.0;
    if (dwell > 0.0) {
      const double lu = in.lambda_u;
      failed += (2.0 - lu) / (lu * lu) + 2.0 * dwell * (1.0 + xw + ew);
    }
    w2 += sat_weight * (out.gamma + (1.0 - out.gamma) * failed);
    c.wait_second = w2 / rate;

    c.peak = 2.0 * c.mean_service + c.mean_wait + 1.0;
    sum += in.weights[m] * (strict ? c.peak - 1.0 : c.peak);
  }
  report.ewspaoi = sum / static_cast<double>(f.cells());
  if (strict) report.ewspaoi += 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// Universal lower bound on EWSAoI

struct BoundReport {
  double value = 0.0;
  double constant_term = 0.0;  // (1/2|V|) sum alpha_m
  double coupling_term = 0.0;  // (1/2|V|^2) (sum_m sqrt(...))^2
  std::vector<std::vector<double>> allocation;  // gamma_{m,k}
};

/// gamma_{m,k} = nu_k f_{m,k}.
inline std::vector<std::vector<double>> allocation_from_throughput(const CoverageMatrix& f, std::span<const double> nu) {
  require_same_size(nu.size(), f.nodes(), "throughput vector");
  std::vector<std::vector<double>> g(f.cells(), std::vector<double>(f.nodes(), 0.0));
  for (std::size_t m = 0; m < f.cells(); ++m)
    for (std::size_t k = 0; k < f.nodes(); ++k) g[m][k] = nu[k] * f.at(m, k);
  return g;
}

inline BoundReport lower_bound(std::span<const NodeSpec> nodes, std::span<const double> weights, const CoverageMatrix& f,
                               const std::vector<std::vector<double>>& allocation) {
  require_same_size(weights.size(), f.cells(), "cell weights");
  require_same_size(allocation.size(), f.cells(), "allocation rows");
  BoundReport out;
  out.allocation = allocation;
  const double cells = static_cast<double>(f.cells());
  double alpha_sum = 0.0, root_sum = 0.0;
  for (std::size_t m = 0; m < f.cells(); ++m) {
    alpha_sum += weights[m];
    double packets = 0.0, reach = 0.0, rate = 0.0;
    for (std::size_t k = 0; k < f.nodes(); ++k) {
      if (!(f.at(m, k) > 0.0)) continue;  // k in K_m
      const double g = allocation[m][k];
      if (g < 0.0) throw ContractError("allocation entries must be non-negative");
      packets += nodes[k].packets * g;
      reach += nodes[k].success_prob * f.at(m, k);
      rate += g;
    }
    if (!(rate > 0.0)) throw InfeasibleError("bound undefined: cell " + std::to_string(m) + " has zero allocation");
    root_sum += std::sqrt(weights[m] * packets / (reach * rate));
  }
  out.constant_term = alpha_sum / (2.0 * cells);
  out.coupling_term = root_sum * root_sum / (2.0 * cells * cells);
  out.value = out.constant_term + out.coupling_term;
  return out;
}

// ---------------------------------------------------------------------------
// Renewal estimates from recorded cycles

struct RenewalEstimate {
  double average_aoi = 0.0;
  double peak_records = 0.0;   // mean of S_prev + W + S over records
  double peak_with_one = 0.0;  // 2 E[S] + E[W] + 1
  double peak_without_one = 0.0;  // 2 E[S] + E[W]
  std::size_t cycles = 0;
};

/// Average and peak AoI from (W, S) samples. Only interior cycles are used
/// since the first cycle of each cell has no predecessor.
inline RenewalEstimate renewal_aoi_from_samples(std::span<const CycleRecord> cycles) {
  if (cycles.empty()) throw ContractError("no cycles supplied");
  double len = 0.0, len2 = 0.0, cross = 0.0, wait = 0.0, service = 0.0, peak = 0.0;
  std::size_t n = 0;
  for (const auto& c : cycles) {
    if (!c.interior) continue;
    const double x = static_cast<double>(c.waiting + c.service);
    len += x;
    len2 += x * x;
    cross += static_cast<double>(c.previous_service) * x;
    wait += static_cast<double>(c.waiting);
    service += static_cast<double>(c.service);
    peak += static_cast<double>(c.peak);
    ++n;
  }
  if (n < 2) throw ContractError("at least two interior cycles are required");
  const double nd = static_cast<double>(n);
  RenewalEstimate out;
  out.cycles = n;
  out.average_aoi = (len2 / nd) / (2.0 * len / nd) + (cross / nd) / (len / nd) + 0.5;
  out.peak_records = peak / nd;
  out.peak_without_one = 2.0 * service / nd + wait / nd;
  out.peak_with_one = out.peak_without_one + 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// IoT-satellite access split

struct SensorParams {
  double mu = 0.0;
  int packets = 1;
  double success_prob = 1.0;
};

struct IoTSatCoefficients {
  std::vector<double> n0, n1, d0, d1, others, k;
};

/// Coefficients of J(alpha) = sum_m (N0 + N1 alpha) / (D0 + D1 alpha) for
/// one sensor per cell, unit weights and alpha = satellite access probability.
inline IoTSatCoefficients iot_sat_coefficients(std::span<const SensorParams> sensors, double lambda_a, double lambda_u,
                                               int l_sat, double p_sat) {
  double total = 0.0;
  for (const auto& s : sensors) total += s.mu;
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("sensor access probabilities must sum to 1");
  IoTSatCoefficients c;
  const auto n = sensors.size();
  c.n0.resize(n), c.n1.resize(n), c.d0.resize(n), c.d1.resize(n), c.others.resize(n), c.k.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const auto& s = sensors[m];
    double others = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != m) others += sensors[j].mu;
    c.others[m] = others;
    c.n0[m] = 2.0 * lambda_a * ((s.packets - 1) + others);
    c.n1[m] = 2.0 * lambda_u * ((l_sat - 1) - s.mu * (s.packets - 1) - others);
    c.d0[m] = lambda_a * s.mu * s.success_prob;
    c.d1[m] = lambda_u * (p_sat - s.mu * s.success_prob);
    c.k[m] = c.n1[m] * c.d0[m] - c.n0[m] * c.d1[m];
  }
  return c;
}

inline double split_objective(const IoTSatCoefficients& c, double alpha) {
  double j = 0.0;
  for (std::size_t m = 0; m < c.k.size(); ++m) j += (c.n0[m] + c.n1[m] * alpha) / (c.d0[m] + c.d1[m] * alpha);
  return j;
}

enum class SplitRegime { all_sat, no_sat, interior };

inline const char* to_string(SplitRegime r) {
  switch (r) {
    case SplitRegime::all_sat: return "all_sat";
    case SplitRegime::no_sat: return "no_sat";
    case SplitRegime::interior: return "interior";
  }
  return "?";
}

struct AlphaChoice {
  double alpha = 0.0;
  SplitRegime regime = SplitRegime::interior;
  std::optional<double> closed_form;  // two-sensor stationary point, when it lies in [0, 1]
};

inline double golden_section_min(const std::function<double(double)>& fn, double lo, double hi, double tol = 1e-8) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - ratio * (b - a);
      fc = fn(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + ratio * (b - a);
      fd = fn(d);
    }
  }
  double x = 0.5 * (a + b);
  // the minimum of a sum of linear-fractional terms can sit on the boundary
  if (fn(lo) <= fn(x)) x = lo;
  if (fn(hi) < fn(x)) x = hi;
  return x;
}

/// Minimizer of J over [0, 1]. J'(alpha) = sum_m K_m / (D0 + D1 alpha)^2,
/// so J is increasing when every K_m > 0 (alpha = 0) and decreasing when
/// every K_m < 0 (alpha = 1); mixed signs are searched numerically.
inline AlphaChoice optimal_alpha(const IoTSatCoefficients& c) {
  // The displayed D0 omits the U-period sensor term, so with p_sat < mu_m p_m
  // a denominator crosses zero inside [0, 1] and J has a pole there.
  for (std::size_t m = 0; m < c.k.size(); ++m)
    if (!(c.d0[m] > 0.0 && c.d0[m] + c.d1[m] > 0.0))
      throw NumericError("split objective has a pole in [0, 1] for cell " + std::to_string(m) +
                         " (p_sat below mu_m p_m); no access split reported");
  AlphaChoice out;
  const bool all_pos = std::all_of(c.k.begin(), c.k.end(), [](double v) { return v > 0.0; });
  const bool all_neg = std::all_of(c.k.begin(), c.k.end(), [](double v) { return v < 0.0; });
  if (all_pos && !c.k.empty()) {
    out.alpha = 0.0;
    out.regime = SplitRegime::no_sat;
  } else if (all_neg && !c.k.empty()) {
    out.alpha = 1.0;
    out.regime = SplitRegime::all_sat;
  } else {
    out.regime = SplitRegime::interior;
    out.alpha = golden_section_min([&](double a) { return split_objective(c, a); }, 0.0, 1.0);
  }
  if (c.k.size() == 2) {
    const double r1 = std::sqrt(std::abs(c.k[0])), r2 = std::sqrt(std::abs(c.k[1]));
    const double den = r2 * c.d1[0] - r1 * c.d1[1];
    if (den != 0.0) {
      const double a = (r1 * c.d0[1] - r2 * c.d0[0]) / den;
      if (a >= 0.0 && a <= 1.0) out.closed_form = a;
    }
  }
  return out;
}

}  // namespace aoisat
