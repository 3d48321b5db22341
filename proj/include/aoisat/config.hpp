#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <toml.hpp>

#include "aoisat/boundary.hpp"
#include "aoisat/error.hpp"
#include "aoisat/experiment.hpp"
#include "aoisat/scenario.hpp"
#include "aoisat/trace.hpp"

namespace aoisat {

struct SweepSpec {
  Axis x, y;
  std::vector<BoundaryMode> modes{BoundaryMode::analytic};
};

struct CompareSpec {
  Param param = Param::l_sat;
  std::vector<double> values;
};

struct ExperimentSpec {
  RunPlan run;
  std::string out = "out";
  CoverageSettings coverage;
  SatelliteOptions analytic;
};

struct Config {
  std::filesystem::path path;
  Scenario scenario;
  PolicySettings policy;
  ExperimentSpec experiment;
  std::optional<SweepSpec> sweep;
  std::optional<CompareSpec> compare;
};

namespace config_detail {

inline std::string where(const toml::node& n) {
  const auto& src = n.source();
  return src.begin ? " (line " + std::to_string(src.begin.line) + ")" : "";
}

inline void only_keys(const toml::table& t, std::string_view section, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : t) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key.str() == a;
    if (!ok)
      throw ConfigError("unknown key '" + std::string(key.str()) + "' in " + std::string(section) + where(value));
  }
}

inline const toml::table& table_at(const toml::table& t, std::string_view key, std::string_view section) {
  const auto* sub = t.get(key);
  if (!sub) throw ConfigError("missing [" + std::string(key) + "] in " + std::string(section));
  if (!sub->is_table()) throw ConfigError("'" + std::string(key) + "' in " + std::string(section) + " must be a table" + where(*sub));
  return *sub->as_table();
}

template <typename T>
std::optional<T> get(const toml::table& t, std::string_view key, std::string_view section) {
  const auto* n = t.get(key);
  if (!n) return std::nullopt;
  if constexpr (std::is_same_v<T, double>) {
    if (n->is_floating_point()) return n->as_floating_point()->get();
    if (n->is_integer()) return static_cast<double>(n->as_integer()->get());
  } else if constexpr (std::is_same_v<T, std::int64_t>) {
    if (n->is_integer()) return n->as_integer()->get();
  } else if constexpr (std::is_same_v<T, bool>) {
    if (n->is_boolean()) return n->as_boolean()->get();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (n->is_string()) return n->as_string()->get();
  }
  throw ConfigError("key '" + std::string(key) + "' in " + std::string(section) + " has the wrong type" + where(*n));
}

template <typename T>
T require(const toml::table& t, std::string_view key, std::string_view section) {
  auto v = get<T>(t, key, section);
  if (!v) throw ConfigError("missing key '" + std::string(key) + "' in " + std::string(section));
  return *v;
}

inline std::vector<double> number_array(const toml::node& n, std::string_view what) {
  const auto* arr = n.as_array();
  if (!arr) throw ConfigError(std::string(what) + " must be an array" + where(n));
  std::vector<double> out;
  for (const auto& e : *arr) {
    if (e.is_floating_point())
      out.push_back(e.as_floating_point()->get());
    else if (e.is_integer())
      out.push_back(static_cast<double>(e.as_integer()->get()));
    else
      throw ConfigError(std::string(what) + " entries must be numbers" + where(e));
  }
  return out;
}

/// Per-node values given as { node_id = value, ... }; unlisted nodes get 0.
inline std::vector<double> node_table(const toml::node& n, const Scenario& s, std::string_view what) {
  if (n.is_array()) {
    auto v = number_array(n, what);
    if (v.size() != s.node_count())
      throw ConfigError(std::string(what) + " lists " + std::to_string(v.size()) + " values for " +
                        std::to_string(s.node_count()) + " nodes" + where(n));
    return v;
  }
  const auto* t = n.as_table();
  if (!t) throw ConfigError(std::string(what) + " must be \"auto\", a table keyed by node id, or an array" + where(n));
  std::vector<double> out(s.node_count(), 0.0);
  for (const auto& [key, value] : *t) {
    const auto k = s.find(std::string(key.str()));
    if (!k) throw ConfigError(std::string(what) + " names unknown node '" + std::string(key.str()) + "'" + where(value));
    if (value.is_floating_point())
      out[static_cast<std::size_t>(*k)] = value.as_floating_point()->get();
    else if (value.is_integer())
      out[static_cast<std::size_t>(*k)] = static_cast<double>(value.as_integer()->get());
    else
      throw ConfigError(std::string(what) + " values must be numbers" + where(value));
  }
  return out;
}

inline bool is_auto(const toml::node& n) { return n.is_string() && n.as_string()->get() == "auto"; }

inline CellId cell_id(std::int64_t v, std::string_view what) {
  if (v < 0 || v > std::numeric_limits<CellId>::max()) throw LookupError("unknown cell id " + std::to_string(v) + " in " + std::string(what));
  return static_cast<CellId>(v);
}

inline NodeSpec parse_node(const toml::table& t, std::size_t index) {
  const std::string section = "[[node]] #" + std::to_string(index + 1);
  only_keys(t, section, {"id", "kind", "l", "p", "home_cell", "radius", "start_cell", "mobility", "route"});
  NodeSpec n;
  n.id = get<std::string>(t, "id", section).value_or("node" + std::to_string(index));
  const auto kind = require<std::string>(t, "kind", section);
  if (kind == "iot")
    n.kind = NodeKind::iot;
  else if (kind == "uav")
    n.kind = NodeKind::uav;
  else if (kind == "satellite")
    n.kind = NodeKind::satellite;
  else
    throw ConfigError("unknown node kind '" + kind + "' in " + section + " (expected iot, uav or satellite)");
  const auto l = require<std::int64_t>(t, "l", section);
  if (l < 1 || l > 1'000'000) throw ConfigError("l must be >= 1 in " + section);
  n.packets = static_cast<int>(l);
  n.success_prob = require<double>(t, "p", section);
  const bool uav = n.kind == NodeKind::uav;
  const auto forbid = [&](std::string_view key, bool allowed) {
    if (!allowed && t.contains(key))
      throw ConfigError("key '" + std::string(key) + "' does not apply to " + kind + " nodes in " + section);
  };
  forbid("home_cell", n.kind == NodeKind::iot);
  forbid("radius", uav);
  forbid("start_cell", uav);
  forbid("mobility", uav);
  forbid("route", uav);
  if (n.kind == NodeKind::iot) n.home_cell = cell_id(require<std::int64_t>(t, "home_cell", section), section);
  if (uav) {
    const auto r = get<std::int64_t>(t, "radius", section).value_or(1);
    if (r < 0) throw ConfigError("radius must be >= 0 in " + section);
    n.radius = static_cast<int>(r);
    const auto mobility = get<std::string>(t, "mobility", section).value_or("random_walk");
    if (mobility == "random_walk") {
      n.mobility.kind = MobilityKind::random_walk;
      forbid("route", false);
    } else if (mobility == "cyclic_route") {
      n.mobility.kind = MobilityKind::cyclic_route;
      const auto* route = t.get("route");
      if (!route) throw ConfigError("cyclic_route mobility needs a route in " + section);
      for (double c : number_array(*route, "route")) n.mobility.route.push_back(cell_id(static_cast<std::int64_t>(c), section));
    } else {
      throw ConfigError("unknown mobility '" + mobility + "' in " + section + " (expected random_walk or cyclic_route)");
    }
    if (const auto start = get<std::int64_t>(t, "start_cell", section))
      n.start_cell = cell_id(*start, section);
    else if (n.mobility.route.empty())
      throw ConfigError("UAV needs start_cell or a route in " + section);
  }
  return n;
}

inline AvailabilityProcess parse_availability(const toml::table& t, const std::filesystem::path& base) {
  const std::string section = "[satellite]";
  const auto model = get<std::string>(t, "model", section).value_or("geometric");
  if (model == "geometric") {
    only_keys(t, section, {"model", "lambda_a", "lambda_u", "initial"});
    const auto initial = get<std::string>(t, "initial", section).value_or("stationary");
    InitialState init = InitialState::stationary;
    if (initial == "available")
      init = InitialState::available;
    else if (initial == "unavailable")
      init = InitialState::unavailable;
    else if (initial != "stationary")
      throw ConfigError("unknown initial state '" + initial + "' (expected stationary, available or unavailable)");
    return AvailabilityProcess::geometric(require<double>(t, "lambda_a", section), require<double>(t, "lambda_u", section),
                                          init);
  }
  if (model == "trace") {
    only_keys(t, section, {"model", "path", "format", "wrap", "slot_seconds", "resolution"});
    auto path = std::filesystem::path(require<std::string>(t, "path", section));
    if (path.is_relative()) path = base / path;
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trace file " + path.string());
    const auto format = parse_trace_format(get<std::string>(t, "format", section).value_or("bitline"));
    const auto trace = parse_trace(in, format, get<double>(t, "resolution", section).value_or(1.0));
    const auto wrap_s = get<std::string>(t, "wrap", section).value_or("repeat");
    TraceWrap wrap = TraceWrap::repeat;
    if (wrap_s == "truncate")
      wrap = TraceWrap::truncate;
    else if (wrap_s != "repeat")
      throw ConfigError("unknown wrap policy '" + wrap_s + "' (expected repeat or truncate)");
    return trace_to_availability(trace, get<double>(t, "slot_seconds", section).value_or(1.0), wrap);
  }
  throw ConfigError("unknown satellite model '" + model + "' (expected geometric or trace)");
}

inline Axis parse_axis(const toml::node& n, std::string_view name) {
  const auto* t = n.as_table();
  const std::string section = "[sweep] " + std::string(name);
  if (!t) throw ConfigError(section + " must be a table {param, from, to, steps}" + where(n));
  only_keys(*t, section, {"param", "from", "to", "steps", "values"});
  const auto param = parse_param(require<std::string>(*t, "param", section));
  if (const auto* values = t->get("values")) return Axis{param, number_array(*values, section + " values")};
  const auto steps = require<std::int64_t>(*t, "steps", section);
  return linear_axis(param, require<double>(*t, "from", section), require<double>(*t, "to", section),
                     static_cast<int>(steps));
}

}  // namespace config_detail

inline Config parse_config(std::string_view text, const std::filesystem::path& origin = "config.toml") {
  using namespace config_detail;
  toml::table root;
  try {
    root = toml::parse(text, origin.string());
  } catch (const toml::parse_error& e) {
    throw ParseError(std::string(e.description()), e.source().begin.line);
  }
  only_keys(root, "top level", {"id", "weights", "grid", "node", "satellite", "policy", "experiment", "sweep", "compare"});
  Config cfg;
  cfg.path = origin;
  const auto base = origin.has_parent_path() ? origin.parent_path() : std::filesystem::path(".");

  const auto& grid_t = table_at(root, "grid", "top level");
  only_keys(grid_t, "[grid]", {"rows", "cols", "adjacency"});
  const auto adjacency = get<std::string>(grid_t, "adjacency", "[grid]").value_or("four");
  Adjacency adj = Adjacency::four;
  if (adjacency == "eight")
    adj = Adjacency::eight;
  else if (adjacency != "four")
    throw ConfigError("unknown adjacency '" + adjacency + "' (expected four or eight)");
  auto graph = build_grid(static_cast<int>(require<std::int64_t>(grid_t, "rows", "[grid]")),
                          static_cast<int>(require<std::int64_t>(grid_t, "cols", "[grid]")), adj);
  if (const auto* w = root.get("weights")) graph = graph.with_weights(number_array(*w, "weights"));

  std::vector<NodeSpec> nodes;
  if (const auto* arr = root.get("node")) {
    if (!arr->is_array_of_tables()) throw ConfigError("nodes must be given as [[node]] tables" + where(*arr));
    std::size_t i = 0;
    for (const auto& n : *arr->as_array()) nodes.push_back(parse_node(*n.as_table(), i++));
  }
  if (nodes.empty()) throw ConfigError("scenario defines no [[node]] entries");

  std::optional<AvailabilityProcess> availability;
  if (const auto* sat = root.get("satellite")) {
    if (!sat->is_table()) throw ConfigError("[satellite] must be a table" + where(*sat));
    availability = parse_availability(*sat->as_table(), base);
  }
  cfg.scenario = Scenario(get<std::string>(root, "id", "top level").value_or(origin.stem().string()), std::move(graph),
                          std::move(nodes), std::move(availability));
  const auto& scenario = cfg.scenario;

  if (const auto* pol = root.get("policy")) {
    if (!pol->is_table()) throw ConfigError("[policy] must be a table" + where(*pol));
    const auto& pt = *pol->as_table();
    only_keys(pt, "[policy]", {"sr", "mw"});
    if (const auto* sr = pt.get("sr")) {
      const auto& t = *sr->as_table();
      only_keys(t, "[policy.sr]", {"mu", "u_period", "sat_unavail_behavior"});
      if (const auto* mu = t.get("mu"); mu && !is_auto(*mu)) cfg.policy.sr_access = node_table(*mu, scenario, "policy.sr.mu");
      if (const auto* u = t.get("u_period"); u && !is_auto(*u))
        cfg.policy.sr_u_period = node_table(*u, scenario, "policy.sr.u_period");
      const auto behavior = get<std::string>(t, "sat_unavail_behavior", "[policy.sr]").value_or("renormalize");
      if (behavior == "idle")
        cfg.policy.sr_unavailable = UnavailableBehavior::idle;
      else if (behavior != "renormalize")
        throw ConfigError("unknown sat_unavail_behavior '" + behavior + "' (expected idle or renormalize)");
    }
    if (const auto* mw = pt.get("mw")) {
      const auto& t = *mw->as_table();
      only_keys(t, "[policy.mw]", {"beta", "targets", "allow_idle"});
      cfg.policy.mw_beta = get<double>(t, "beta", "[policy.mw]").value_or(1.0);
      cfg.policy.mw_allow_idle = get<bool>(t, "allow_idle", "[policy.mw]").value_or(false);
      if (const auto* tg = t.get("targets"); tg && !is_auto(*tg))
        cfg.policy.mw_targets = node_table(*tg, scenario, "policy.mw.targets");
    }
  }

  if (const auto* ex = root.get("experiment")) {
    const auto& t = *ex->as_table();
    const std::string section = "[experiment]";
    only_keys(t, section,
              {"policies", "seeds", "horizon", "burn_in", "out", "workers", "coverage_horizon", "coverage_seed", "formulas",
               "dwell"});
    auto& e = cfg.experiment;
    if (const auto* p = t.get("policies")) {
      e.run.policies.clear();
      const auto* arr = p->as_array();
      if (!arr) throw ConfigError("policies must be an array of names" + where(*p));
      for (const auto& v : *arr) {
        if (!v.is_string()) throw ConfigError("policy names must be strings" + where(v));
        e.run.policies.push_back(v.as_string()->get());
      }
    }
    if (const auto* s = t.get("seeds")) {
      e.run.seeds.clear();
      if (s->is_integer()) {
        for (std::int64_t i = 1; i <= s->as_integer()->get(); ++i) e.run.seeds.push_back(static_cast<std::uint64_t>(i));
      } else {
        for (double v : number_array(*s, "seeds")) e.run.seeds.push_back(static_cast<std::uint64_t>(v));
      }
      if (e.run.seeds.empty()) throw ConfigError("seeds must not be empty");
    }
    e.run.horizon = get<std::int64_t>(t, "horizon", section).value_or(e.run.horizon);
    e.run.burn_in = get<std::int64_t>(t, "burn_in", section).value_or(e.run.burn_in);
    e.run.workers = static_cast<int>(get<std::int64_t>(t, "workers", section).value_or(0));
    e.out = get<std::string>(t, "out", section).value_or(e.out);
    e.coverage.horizon = get<std::int64_t>(t, "coverage_horizon", section).value_or(e.coverage.horizon);
    e.coverage.seed = static_cast<std::uint64_t>(get<std::int64_t>(t, "coverage_seed", section).value_or(0));
    const auto mode = get<std::string>(t, "formulas", section).value_or("appendix");
    if (mode == "strict")
      e.analytic.mode = FormulaMode::strict;
    else if (mode != "appendix")
      throw ConfigError("unknown formula mode '" + mode + "' (expected appendix or strict)");
    e.analytic.unavailable_dwell = get<bool>(t, "dwell", section).value_or(false);
    if (e.run.horizon < 1) throw ConfigError("horizon must be >= 1");
  }

  if (const auto* sw = root.get("sweep")) {
    const auto& t = *sw->as_table();
    only_keys(t, "[sweep]", {"x", "y", "modes"});
    SweepSpec spec;
    if (!t.get("x") || !t.get("y")) throw ConfigError("[sweep] needs exactly two axes (x and y)");
    spec.x = parse_axis(*t.get("x"), "x");
    spec.y = parse_axis(*t.get("y"), "y");
    if (const auto* m = t.get("modes")) {
      spec.modes.clear();
      for (const auto& v : *m->as_array()) {
        const auto s = v.value<std::string>().value_or("");
        if (s == "analytic")
          spec.modes.push_back(BoundaryMode::analytic);
        else if (s == "simulated")
          spec.modes.push_back(BoundaryMode::simulated);
        else
          throw ConfigError("unknown sweep mode '" + s + "' (expected analytic or simulated)" + where(v));
      }
    }
    cfg.sweep = std::move(spec);
  }

  if (const auto* cp = root.get("compare")) {
    const auto& t = *cp->as_table();
    only_keys(t, "[compare]", {"param", "values"});
    CompareSpec spec;
    spec.param = parse_param(get<std::string>(t, "param", "[compare]").value_or("l_sat"));
    if (const auto* v = t.get("values")) spec.values = number_array(*v, "compare values");
    cfg.compare = std::move(spec);
  }
  return cfg;
}

inline Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace aoisat
