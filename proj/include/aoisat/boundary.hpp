#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "aoisat/analytics.hpp"
#include "aoisat/experiment.hpp"

namespace aoisat {

/// Coverage with the satellite column reset to the scenario's availability
/// fraction, so one terrestrial estimate serves every sweep point.
inline CoverageMatrix with_sat_column(CoverageMatrix f, const Scenario& scenario) {
  if (const auto sat = scenario.satellite()) {
    const double frac = scenario.availability()->availability_fraction();
    for (std::size_t m = 0; m < f.cells(); ++m) f.at(m, static_cast<std::size_t>(*sat)) = frac;
  }
  return f;
}

struct AnalyticComparison {
  double with_sat = 0.0;
  double without_sat = 0.0;
  SatelliteReport satellite;
  PeakAoiReport ground;
};

/// Closed-form EWSPAoI of a randomized policy with its satellite, and
/// of the terrestrial-only counterpart (the policy's U-period distribution).
inline AnalyticComparison analyze_randomized(const Scenario& scenario, const RandomizedPolicy& sr,
                                             const CoverageMatrix& f, SatelliteOptions options = {}) {
  const auto sat = scenario.satellite();
  if (!sat) throw ConfigError("scenario '" + scenario.id() + "' has no satellite node");
  if (!scenario.availability()->is_geometric())
    throw UnsupportedError("analytic evaluation assumes the geometric availability model; use simulated mode for traces");
  AnalyticComparison out;
  const auto u_dist = sr.effective(false, sat);
  SatelliteInputs in{scenario.nodes(),
                     scenario.graph().weights(),
                     sr.access,
                     u_dist,
                     &f,
                     *sat,
                     scenario.availability()->lambda_a(),
                     scenario.availability()->lambda_u()};
  out.satellite = ewspaoi_with_sat(in, options);
  out.with_sat = out.satellite.peak.ewspaoi;
  const auto ground = scenario.without_satellite();
  const auto ground_policy = terrestrial_counterpart(sr, sat);
  out.ground = ewspaoi_no_sat(ground.nodes(), ground.graph().weights(), ground_policy.access, drop_column(f, sat),
                              {options.mode});
  out.without_sat = out.ground.ewspaoi;
  return out;
}

struct Axis {
  Param param = Param::p_sat;
  std::vector<double> values;
};

inline Axis linear_axis(Param param, double from, double to, int steps) {
  if (steps < 1) throw ConfigError("axis needs at least one step");
  Axis a{param, {}};
  for (int i = 0; i < steps; ++i) {
    double v = steps == 1 ? from : from + (to - from) * i / (steps - 1);
    if (param == Param::l_sat) v = std::round(v);
    a.values.push_back(v);
  }
  return a;
}

enum class BoundaryMode { analytic, simulated };

inline std::string_view to_string(BoundaryMode m) { return m == BoundaryMode::analytic ? "analytic" : "simulated"; }

struct BoundaryCell {
  double x = 0.0;
  double y = 0.0;
  double with_sat = 0.0;
  double without_sat = 0.0;
  double diff = 0.0;  // with - without; negative where the satellite helps
};

struct BoundaryGrid {
  Axis x, y;
  BoundaryMode mode = BoundaryMode::analytic;
  std::vector<BoundaryCell> cells;  // x-major: cells[ix * ny + iy]

  const BoundaryCell& at(std::size_t ix, std::size_t iy) const { return cells[ix * y.values.size() + iy]; }
};

struct BoundaryRequest {
  const Scenario* scenario = nullptr;
  PolicySettings settings;
  CoverageMatrix coverage;  // from the base scenario
  Axis x, y;
  SatelliteOptions analytic;
  RunPlan simulation;  // seeds, horizon, burn-in, workers; policies ignored
};

namespace detail {

inline double mean_peak(const Scenario& s, const RandomizedPolicy& sr, const RunPlan& plan, unsigned workers) {
  const auto runs = parallel_map<double>(plan.seeds.size(), workers, [&](std::size_t i) {
    return run(s, sr, {plan.horizon, plan.seeds[i], plan.burn_in, false}).summary.ewspaoi.value_or(std::nan(""));
  });
  double sum = 0.0;
  for (double v : runs) sum += v;
  return sum / static_cast<double>(runs.size());
}

}  // namespace detail

/// EWSPAoI with minus without satellite over a two-parameter grid.
/// Simulated mode pairs each configuration with the terrestrial-only run
/// under the same seeds (common random numbers).
inline BoundaryGrid decision_boundary(const BoundaryRequest& req, BoundaryMode mode) {
  if (!req.scenario) throw ContractError("boundary request has no scenario");
  const auto& base = *req.scenario;
  if (mode == BoundaryMode::analytic && base.availability() && !base.availability()->is_geometric())
    throw UnsupportedError("analytic boundary requires the geometric availability model");
  BoundaryGrid grid;
  grid.x = req.x;
  grid.y = req.y;
  grid.mode = mode;
  const auto nx = req.x.values.size(), ny = req.y.values.size();

  struct Point {
    Scenario scenario;
    RandomizedPolicy policy;
    CoverageMatrix coverage;
  };
  std::vector<Point> points;
  points.reserve(nx * ny);
  for (std::size_t ix = 0; ix < nx; ++ix)
    for (std::size_t iy = 0; iy < ny; ++iy) {
      auto s = apply_parameter(apply_parameter(base, req.x.param, req.x.values[ix]), req.y.param, req.y.values[iy]);
      auto f = with_sat_column(req.coverage, s);
      auto sr = build_randomized(s, req.settings, f);
      points.push_back({std::move(s), std::move(sr), std::move(f)});
    }

  const unsigned workers = resolve_workers(req.simulation.workers);
  std::vector<std::pair<double, double>> values;
  if (mode == BoundaryMode::analytic) {
    values = parallel_map<std::pair<double, double>>(points.size(), workers, [&](std::size_t i) {
      const auto r = analyze_randomized(points[i].scenario, points[i].policy, points[i].coverage, req.analytic);
      return std::pair{r.with_sat, r.without_sat};
    });
  } else {
    // Terrestrial baselines depend only on the U-period distribution.
    std::map<std::vector<double>, double> baseline;
    for (const auto& p : points) {
      auto ground = terrestrial_counterpart(p.policy, p.scenario.satellite());
      if (!baseline.count(ground.access))
        baseline[ground.access] = detail::mean_peak(p.scenario.without_satellite(), ground, req.simulation, workers);
    }
    const auto with = parallel_map<double>(points.size(), workers, [&](std::size_t i) {
      return detail::mean_peak(points[i].scenario, points[i].policy, req.simulation, 1);
    });
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto ground = terrestrial_counterpart(points[i].policy, points[i].scenario.satellite());
      values.emplace_back(with[i], baseline.at(ground.access));
    }
  }
  for (std::size_t ix = 0; ix < nx; ++ix)
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const auto& [w, wo] = values[ix * ny + iy];
      grid.cells.push_back({req.x.values[ix], req.y.values[iy], w, wo, w - wo});
    }
  return grid;
}

struct ContourPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Zero crossings of diff by linear interpolation between grid neighbours,
/// along columns (fixed x) and then along rows (fixed y).
inline std::vector<ContourPoint> zero_contour(const BoundaryGrid& g) {
  std::vector<ContourPoint> out;
  const auto nx = g.x.values.size(), ny = g.y.values.size();
  const auto cross = [](double a, double b) { return (a < 0.0) != (b < 0.0); };
  for (std::size_t ix = 0; ix < nx; ++ix)
    for (std::size_t iy = 0; iy + 1 < ny; ++iy) {
      const auto &a = g.at(ix, iy), &b = g.at(ix, iy + 1);
      if (!cross(a.diff, b.diff)) continue;
      const double t = a.diff / (a.diff - b.diff);
      out.push_back({a.x, a.y + t * (b.y - a.y)});
    }
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
      const auto &a = g.at(ix, iy), &b = g.at(ix + 1, iy);
      if (!cross(a.diff, b.diff)) continue;
      const double t = a.diff / (a.diff - b.diff);
      out.push_back({a.x + t * (b.x - a.x), a.y});
    }
  return out;
}

/// Per column, the number of grid points where the satellite helps. For a
/// column with a single sign change this is the boundary's grid index.
inline std::vector<int> boundary_positions(const BoundaryGrid& g) {
  std::vector<int> out(g.x.values.size(), 0);
  for (std::size_t ix = 0; ix < g.x.values.size(); ++ix)
    for (std::size_t iy = 0; iy < g.y.values.size(); ++iy)
      if (g.at(ix, iy).diff < 0.0) ++out[ix];
  return out;
}

}  // namespace aoisat
