#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "aoisat/boundary.hpp"
#include "aoisat/error.hpp"
#include "aoisat/experiment.hpp"

namespace aoisat {

/// Nine significant digits, "nan" for NaN, empty for an absent value.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

inline std::string csv_quote(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

  template <typename... Fields>
  void add(const Fields&... fields) {
    std::vector<std::string> r{cell(fields)...};
    row(r);
  }

  void row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) throw ContractError("csv row has the wrong number of fields");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_quote(fields[i]);
    }
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(std::string_view s) { return std::string(s); }
  static std::string cell(double v) { return fmt(v); }
  static std::string cell(const std::optional<double>& v) { return fmt(v); }
  template <typename I>
    requires std::is_integral_v<I>
  static std::string cell(I v) {
    return std::to_string(v);
  }

  std::size_t columns_;
  std::ostringstream out_;
};

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

/// {id: value, ...} keyed by node id.
inline std::string node_map(const Scenario& s, std::span<const double> values) {
  std::string out = "{";
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ", ";
    out += s.nodes()[k].id + ": " + fmt(values[k]);
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Simulation outputs

inline std::string runs_csv(const Scenario& s, std::span<const RunRow> rows, bool timing) {
  std::vector<std::string> header{"scenario_id", "policy_id", "seed", "horizon", "burn_in", "ewsaoi", "ewspaoi",
                                  "nu", "failed_sat_updates", "lower_bound"};
  if (timing) header.push_back("wall_time_ms");
  CsvWriter w(header);
  for (const auto& r : rows) {
    std::vector<std::string> f{r.scenario,
                               r.policy,
                               std::to_string(r.seed),
                               std::to_string(r.horizon),
                               std::to_string(r.burn_in),
                               fmt(r.summary.ewsaoi),
                               fmt(r.summary.ewspaoi),
                               node_map(s, r.summary.throughput),
                               std::to_string(r.summary.failed_sat_updates),
                               fmt(r.bound)};
    if (timing) f.push_back(fmt(r.wall_ms));
    w.row(f);
  }
  return w.str();
}

/// CI columns are present only when every group has at least two runs.
inline std::string aggregate_csv(std::span<const AggregateRow> rows) {
  bool ci = !rows.empty();
  for (const auto& r : rows) ci = ci && r.ewsaoi.n >= 2;
  std::vector<std::string> header{"scenario_id", "policy_id", "runs", "ewsaoi_mean"};
  if (ci) header.push_back("ewsaoi_ci95");
  header.push_back("ewspaoi_mean");
  if (ci) header.push_back("ewspaoi_ci95");
  header.push_back("lower_bound");
  CsvWriter w(header);
  for (const auto& r : rows) {
    std::vector<std::string> f{r.scenario, r.policy, std::to_string(r.ewsaoi.n), fmt(r.ewsaoi.mean)};
    if (ci) f.push_back(fmt(r.ewsaoi.half_width));
    f.push_back(r.ewspaoi.n ? fmt(r.ewspaoi.mean) : std::string());
    if (ci) f.push_back(fmt(r.ewspaoi.half_width));
    f.push_back(std::isfinite(r.bound_max) ? fmt(r.bound_max) : std::string());
    w.row(f);
  }
  return w.str();
}

inline std::string cycles_csv(std::span<const RunRow> rows) {
  CsvWriter w({"policy_id", "seed", "cell", "i", "W", "S", "peak"});
  for (const auto& r : rows)
    for (const auto& c : r.cycles) w.add(r.policy, r.seed, c.cell, c.index, c.waiting, c.service, c.peak);
  return w.str();
}

// ---------------------------------------------------------------------------
// Analytic outputs

/// Per-cell terms of a peak-AoI report; peak_contrib = alpha_m peak_m / |V|.
inline void add_peak_rows(CsvWriter& w, std::string_view model, const PeakAoiReport& r, std::span<const double> weights) {
  const double cells = static_cast<double>(r.cells.size());
  for (std::size_t m = 0; m < r.cells.size(); ++m) {
    const auto& c = r.cells[m];
    w.add(model, m, c.rate, c.mean_service, c.mean_wait, c.service_second, c.wait_second, c.peak,
          weights[m] * c.peak / cells);
  }
}

inline CsvWriter peak_cells_writer() {
  return CsvWriter({"model", "cell", "B_or_C", "E_S", "E_W", "E_S2", "E_W2", "peak", "peak_contrib"});
}

// ---------------------------------------------------------------------------
// Sweeps and comparisons

inline std::string boundary_csv(const BoundaryGrid& g) {
  CsvWriter w({"axis1", "axis2", "ewspaoi_with", "ewspaoi_without", "diff", "mode"});
  for (const auto& c : g.cells) w.add(c.x, c.y, c.with_sat, c.without_sat, c.diff, to_string(g.mode));
  return w.str();
}

inline std::string contour_csv(const BoundaryGrid& g) {
  CsvWriter w({"axis1", "axis2", "mode"});
  for (const auto& p : zero_contour(g)) w.add(p.x, p.y, to_string(g.mode));
  return w.str();
}

struct ComparePoint {
  double value = 0.0;
  std::vector<AggregateRow> rows;
};

inline std::string compare_csv(Param param, std::span<const ComparePoint> points) {
  CsvWriter w({"param", "value", "policy_id", "runs", "ewsaoi_mean", "ewsaoi_ci95", "ewspaoi_mean", "ewspaoi_ci95"});
  for (const auto& p : points)
    for (const auto& r : p.rows)
      w.add(to_string(param), p.value, r.policy, r.ewsaoi.n, r.ewsaoi.mean, r.ewsaoi.half_width,
            r.ewspaoi.n ? std::optional<double>(r.ewspaoi.mean) : std::nullopt, r.ewspaoi.half_width);
  return w.str();
}

/// matplotlib script drawing boundary heatmaps and comparison lines from the
/// CSVs next to it. Missing inputs are skipped.
inline std::string plot_script() {
  return R"PY(#!/usr/bin/env python3
# Renders boundary*.csv as heatmaps with the zero contour and compare.csv as
# one line per policy. Usage: python3 plot.py [output_dir]
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(os.path.abspath(__file__))


def rows(name):
    path = os.path.join(here, name)
    if not os.path.exists(path):
        return None
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


for mode in ("analytic", "simulated"):
    grid = rows(f"boundary_{mode}.csv")
    if not grid:
        continue
    xs = sorted({float(r["axis1"]) for r in grid})
    ys = sorted({float(r["axis2"]) for r in grid})
    z = [[0.0] * len(xs) for _ in ys]
    for r in grid:
        z[ys.index(float(r["axis2"]))][xs.index(float(r["axis1"]))] = float(r["diff"])
    fig, ax = plt.subplots(figsize=(5, 4))
    lim = max(abs(v) for row in z for v in row) or 1.0
    mesh = ax.pcolormesh(xs, ys, z, cmap="RdBu_r", vmin=-lim, vmax=lim, shading="nearest")
    ax.contour(xs, ys, z, levels=[0.0], colors="k")
    fig.colorbar(mesh, ax=ax, label="EWSPAoI with - without satellite")
    ax.set_title(f"decision boundary ({mode})")
    fig.tight_layout()
    fig.savefig(os.path.join(here, f"boundary_{mode}.png"), dpi=150)

cmp = rows("compare.csv")
if cmp:
    fig, ax = plt.subplots(figsize=(5, 4))
    for policy in sorted({r["policy_id"] for r in cmp}):
        pts = [r for r in cmp if r["policy_id"] == policy]
        x = [float(r["value"]) for r in pts]
        y = [float(r["ewsaoi_mean"]) for r in pts]
        err = [float(r["ewsaoi_ci95"] or 0) for r in pts]
        ax.errorbar(x, y, yerr=err, marker="o", label=policy, capsize=2)
    ax.set_xlabel(cmp[0]["param"])
    ax.set_ylabel("EWSAoI")
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(here, "compare.png"), dpi=150)
)PY";
}

}  // namespace aoisat
