#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aoisat/aoisat.hpp"

namespace fs = std::filesystem;
using namespace aoisat;

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::string seeds;
  std::int64_t horizon = 0;
  int workers = -1;
  bool strict = false;
  bool dwell = false;
};

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (text.find(',') == std::string::npos) {
    const auto n = std::stoll(text);
    if (n < 1) throw ConfigError("--seeds needs a positive count or a comma-separated list");
    for (long long i = 1; i <= n; ++i) out.push_back(static_cast<std::uint64_t>(i));
    return out;
  }
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(std::stoull(item));
  if (out.empty()) throw ConfigError("--seeds list is empty");
  return out;
}

Config load(const CommonFlags& f) {
  auto cfg = load_config(f.config);
  auto& e = cfg.experiment;
  if (!f.seeds.empty()) {
    try {
      e.run.seeds = parse_seeds(f.seeds);
    } catch (const std::invalid_argument&) {
      throw ConfigError("bad --seeds value '" + f.seeds + "'");
    }
  }
  if (f.horizon > 0) e.run.horizon = f.horizon;
  if (f.workers >= 0) e.run.workers = f.workers;
  if (f.strict) e.analytic.mode = FormulaMode::strict;
  if (f.dwell) e.analytic.unavailable_dwell = true;
  if (!f.out.empty()) e.out = f.out;
  if (e.run.burn_in >= e.run.horizon) throw ConfigError("burn_in must be smaller than the horizon");
  for (const auto& w : cfg.scenario.warnings()) std::cerr << "warning: " << w << '\n';
  return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "scenario/plan TOML file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory (overrides [experiment].out)");
  cmd->add_option("--seeds", f.seeds, "seed count N (seeds 1..N) or comma-separated list");
  cmd->add_option("--horizon", f.horizon, "slots per run");
  cmd->add_option("--workers", f.workers, "worker threads (0 = AOISAT_WORKERS or hardware)");
  cmd->add_flag("--strict-prop", f.strict, "use the as-printed closed forms instead of the derived ones");
  cmd->add_flag("--dwell", f.dwell, "add the 1/lambda_U dwell after failed satellite updates");
}

void report(const fs::path& path) { std::cout << "wrote " << path.string() << '\n'; }

void emit(const fs::path& path, const std::string& content) {
  write_file(path, content);
  report(path);
}

int cmd_simulate(const CommonFlags& flags, const std::vector<std::string>& policies, bool timing, bool dump_cycles) {
  auto cfg = load(flags);
  auto plan = cfg.experiment.run;
  if (!policies.empty()) plan.policies = policies;
  plan.timing = timing;
  plan.record_cycles = dump_cycles;
  const auto f = scenario_coverage(cfg.scenario, cfg.experiment.coverage);
  const auto rows = run_all(cfg.scenario, cfg.policy, f, plan);
  const fs::path out = cfg.experiment.out;
  emit(out / "runs.csv", runs_csv(cfg.scenario, rows, timing));
  const auto agg = aggregate(rows);
  emit(out / "aggregate.csv", aggregate_csv(agg));
  if (dump_cycles) emit(out / "cycles.csv", cycles_csv(rows));
  for (const auto& a : agg) {
    std::cout << a.policy << ": ewsaoi " << fmt(a.ewsaoi.mean);
    if (a.ewsaoi.half_width) std::cout << " +- " << fmt(*a.ewsaoi.half_width);
    if (a.ewspaoi.n) std::cout << ", ewspaoi " << fmt(a.ewspaoi.mean);
    std::cout << '\n';
  }
  return 0;
}

int cmd_analyze(const CommonFlags& flags) {
  auto cfg = load(flags);
  const auto& s = cfg.scenario;
  const auto f = scenario_coverage(s, cfg.experiment.coverage);
  const auto weights = s.graph().weights();
  const auto sr = build_randomized(s, cfg.policy, f);
  const auto sat = s.satellite();

  auto cells = peak_cells_writer();
  CsvWriter summary({"quantity", "value"});
  const auto put = [&](std::string_view key, const std::optional<double>& v) { summary.add(key, v); };

  const auto ground = s.without_satellite();
  const auto ground_policy = terrestrial_counterpart(sr, sat);
  const auto no_sat = ewspaoi_no_sat(ground.nodes(), weights, ground_policy.access, drop_column(f, sat),
                                     {cfg.experiment.analytic.mode});
  add_peak_rows(cells, "without_sat", no_sat, weights);
  put("ewspaoi_without_sat", no_sat.ewspaoi);

  if (sat && s.availability()->is_geometric()) {
    const auto cmp = analyze_randomized(s, sr, f, cfg.experiment.analytic);
    add_peak_rows(cells, "with_sat", cmp.satellite.peak, weights);
    put("ewspaoi_with_sat", cmp.with_sat);
    put("gamma", cmp.satellite.gamma);
    put("beta", cmp.satellite.beta);
    put("d_a", cmp.satellite.d_a);
    put("d_u", cmp.satellite.d_u);
    put("wasted_mean", cmp.satellite.wasted.mean);
    put("wasted_second_moment", cmp.satellite.wasted.second_moment);
    put("availability", cmp.satellite.availability);
  } else if (sat) {
    std::cerr << "note: trace-driven availability has no closed form; with-satellite terms come from simulate\n";
  }

  const auto targets = solve_targets(s.nodes(), weights, f);
  const auto bound = lower_bound(s.nodes(), weights, f, allocation_from_throughput(f, targets.nu));
  put("lower_bound", bound.value);
  put("lower_bound_constant", bound.constant_term);
  put("lower_bound_coupling", bound.coupling_term);

  // Access split between one sensor per cell and the satellite.
  if (sat && s.availability()->is_geometric()) {
    bool sensors_only = ground.node_count() == s.cell_count();
    std::vector<SensorParams> sensors;
    for (std::size_t k = 0; k < ground.node_count(); ++k) {
      const auto& n = ground.nodes()[k];
      sensors_only = sensors_only && n.kind == NodeKind::iot && n.home_cell == static_cast<CellId>(k);
      sensors.push_back({ground_policy.access[k], n.packets, n.success_prob});
    }
    double sensor_total = 0.0;
    for (const auto& x : sensors) sensor_total += x.mu;
    if (sensors_only && std::abs(sensor_total - 1.0) > 1e-9) {
      std::cerr << "note: access split skipped, the U-period sensor distribution does not sum to 1\n";
      sensors_only = false;
    }
    if (sensors_only) {
      const auto& satn = s.node(*sat);
      const auto coeffs = iot_sat_coefficients(sensors, s.availability()->lambda_a(), s.availability()->lambda_u(),
                                               satn.packets, satn.success_prob);
      try {
        const auto choice = optimal_alpha(coeffs);
        put("alpha_star", choice.alpha);
        summary.add("alpha_regime", to_string(choice.regime));
        put("alpha_closed_form", choice.closed_form);
        put("split_objective", split_objective(coeffs, choice.alpha));
      } catch (const NumericError& e) {
        std::cerr << "note: " << e.what() << '\n';
      }
    }
  }

  CsvWriter tg({"node", "kind", "target_throughput", "sr_access"});
  for (std::size_t k = 0; k < s.node_count(); ++k)
    tg.add(s.nodes()[k].id, to_string(s.nodes()[k].kind), targets.nu[k], sr.access[k]);

  const fs::path out = cfg.experiment.out;
  emit(out / "analytic_cells.csv", cells.str());
  emit(out / "analytic_summary.csv", summary.str());
  emit(out / "targets.csv", tg.str());
  std::cout << summary.str();
  return 0;
}

int cmd_sweep(const CommonFlags& flags, const std::string& mode_flag) {
  auto cfg = load(flags);
  if (!cfg.sweep) throw ConfigError("config has no [sweep] section");
  auto modes = cfg.sweep->modes;
  if (mode_flag == "analytic")
    modes = {BoundaryMode::analytic};
  else if (mode_flag == "simulated")
    modes = {BoundaryMode::simulated};
  else if (mode_flag == "both")
    modes = {BoundaryMode::analytic, BoundaryMode::simulated};
  else if (!mode_flag.empty())
    throw ConfigError("unknown --mode '" + mode_flag + "' (expected analytic, simulated or both)");

  BoundaryRequest req;
  req.scenario = &cfg.scenario;
  req.settings = cfg.policy;
  req.coverage = scenario_coverage(cfg.scenario, cfg.experiment.coverage);
  req.x = cfg.sweep->x;
  req.y = cfg.sweep->y;
  req.analytic = cfg.experiment.analytic;
  req.simulation = cfg.experiment.run;
  const fs::path out = cfg.experiment.out;
  std::vector<BoundaryGrid> grids;
  for (auto mode : modes) {
    grids.push_back(decision_boundary(req, mode));
    const std::string tag(to_string(mode));
    emit(out / ("boundary_" + tag + ".csv"), boundary_csv(grids.back()));
    emit(out / ("contour_" + tag + ".csv"), contour_csv(grids.back()));
  }
  if (grids.size() == 2) {
    const auto a = boundary_positions(grids[0]), b = boundary_positions(grids[1]);
    int worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    std::cout << "largest per-column boundary shift between modes: " << worst << " grid cells\n";
  }
  emit(out / "plot.py", plot_script());
  return 0;
}

int cmd_compare(const CommonFlags& flags, const std::vector<std::string>& policies) {
  auto cfg = load(flags);
  if (!cfg.compare || cfg.compare->values.empty()) throw ConfigError("config has no [compare] values");
  auto plan = cfg.experiment.run;
  if (!policies.empty()) plan.policies = policies;
  const auto base = scenario_coverage(cfg.scenario, cfg.experiment.coverage);
  std::vector<ComparePoint> points;
  for (double v : cfg.compare->values) {
    const auto s = apply_parameter(cfg.scenario, cfg.compare->param, v);
    const auto rows = run_all(s, cfg.policy, with_sat_column(base, s), plan);
    points.push_back({v, aggregate(rows)});
    for (const auto& a : points.back().rows)
      std::cout << to_string(cfg.compare->param) << '=' << fmt(v) << ' ' << a.policy << ": ewsaoi "
                << fmt(a.ewsaoi.mean) << '\n';
  }
  const fs::path out = cfg.experiment.out;
  emit(out / "compare.csv", compare_csv(cfg.compare->param, points));
  emit(out / "plot.py", plot_script());
  return 0;
}

int cmd_trace_stats(const std::string& path, const std::string& format, double resolution) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file " + path);
  const auto trace = parse_trace(in, parse_trace_format(format), resolution);
  const auto st = trace_stats(trace);
  CsvWriter w({"samples", "availability", "mean_on_s", "mean_off_s", "on_runs", "off_runs"});
  w.add(st.samples, st.availability, st.mean_on_s, st.mean_off_s, st.on_runs, st.off_runs);
  std::cout << w.str();
  return 0;
}

int cmd_trace_gen(const std::string& out, std::size_t samples, std::uint64_t seed, double la, double lu,
                  const std::string& format) {
  const auto trace = geometric_trace(samples, seed, la, lu);
  emit(out, serialize_trace(trace, parse_trace_format(format)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-Information simulator and analytics for terrestrial/UAV/satellite IoT networks"};
  app.require_subcommand(1);

  CommonFlags sim_flags, an_flags, sw_flags, cmp_flags;
  std::vector<std::string> sim_policies, cmp_policies;
  bool timing = false, dump_cycles = false;
  auto* sim = app.add_subcommand("simulate", "run every (policy, seed) pair and write runs.csv and aggregate.csv");
  add_common(sim, sim_flags);
  sim->add_option("--policies", sim_policies, "policies to run (sr, mw, greedy, mwl1)")->delimiter(',');
  sim->add_flag("--timing", timing, "add a wall_time_ms column (output is then not reproducible)");
  sim->add_flag("--dump-cycles", dump_cycles, "write per-cycle records to cycles.csv");

  auto* an = app.add_subcommand("analyze", "closed-form peak AoI, lower bound and access split");
  add_common(an, an_flags);

  std::string sweep_mode;
  auto* sw = app.add_subcommand("sweep", "decision boundary over two scenario parameters");
  add_common(sw, sw_flags);
  sw->add_option("--mode", sweep_mode, "analytic, simulated or both (default: [sweep].modes)");

  auto* cmp = app.add_subcommand("compare", "policy comparison along one scenario parameter");
  add_common(cmp, cmp_flags);
  cmp->add_option("--policies", cmp_policies, "policies to run")->delimiter(',');

  std::string trace_path, trace_format = "bitline";
  double trace_resolution = 1.0;
  auto* ts = app.add_subcommand("trace-stats", "availability statistics of a visibility trace");
  ts->add_option("trace", trace_path, "trace file")->required();
  ts->add_option("--format", trace_format, "bitline or intervals");
  ts->add_option("--resolution", trace_resolution, "seconds per sample");

  std::string gen_out, gen_format = "bitline";
  std::size_t gen_samples = 100000;
  std::uint64_t gen_seed = 1;
  double gen_la = 1.0 / 967.1, gen_lu = 1.0 / 657.0;
  auto* tg = app.add_subcommand("trace-gen", "write a synthetic geometric visibility trace");
  tg->add_option("--out", gen_out, "output file")->required();
  tg->add_option("--samples", gen_samples, "number of 1 s samples");
  tg->add_option("--seed", gen_seed, "generator seed");
  tg->add_option("--lambda-a", gen_la, "per-second end-of-visibility probability");
  tg->add_option("--lambda-u", gen_lu, "per-second start-of-visibility probability");
  tg->add_option("--format", gen_format, "bitline or intervals");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(sim_flags, sim_policies, timing, dump_cycles);
    if (*an) return cmd_analyze(an_flags);
    if (*sw) return cmd_sweep(sw_flags, sweep_mode);
    if (*cmp) return cmd_compare(cmp_flags, cmp_policies);
    if (*ts) return cmd_trace_stats(trace_path, trace_format, trace_resolution);
    if (*tg) return cmd_trace_gen(gen_out, gen_samples, gen_seed, gen_la, gen_lu, gen_format);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
