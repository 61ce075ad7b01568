#include "moplan/mission.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "moplan/errors.hpp"
#include "moplan/keyvalue.hpp"

namespace moplan {

RawPath concatenate(std::span<const RawPath> segments) {
  RawPath out;
  for (const auto& seg : segments) {
    if (seg.cells.empty()) throw RangeError("empty mission segment");
    const bool first = out.cells.empty();
    if (!first && out.cells.back() != seg.cells.front()) {
      throw RangeError("mission segment does not start where the previous one ended");
    }
    const std::size_t skip = first ? 0 : 1;
    out.cells.insert(out.cells.end(), seg.cells.begin() + static_cast<std::ptrdiff_t>(skip), seg.cells.end());
    out.node_science.insert(out.node_science.end(), seg.node_science.begin() + static_cast<std::ptrdiff_t>(skip),
                            seg.node_science.end());
    out.edges.insert(out.edges.end(), seg.edges.begin(), seg.edges.end());
    out.total_cost += seg.total_cost;
  }
  return out;
}

MissionPlan plan_mission(const MapStack& stack, const CostConfig& config, std::span<const Cell> waypoints,
                         std::span<const CostWeights> weights_per_segment, TraversalTime time_model) {
  if (waypoints.size() < 2) throw ConfigError("a mission needs at least two waypoints");
  const std::size_t n_segments = waypoints.size() - 1;
  if (weights_per_segment.size() != 1 && weights_per_segment.size() != n_segments) {
    throw ConfigError(fmt::format("{} segment weight triples given for {} segments", weights_per_segment.size(),
                                  n_segments));
  }

  MissionPlan mission;
  mission.map_id = map_id(stack, config);
  mission.waypoints.assign(waypoints.begin(), waypoints.end());
  const CostDomain domain = feasible_domain(stack);
  NormalizationConstants norms;
  for (std::size_t i = 0; i < n_segments; ++i) {
    const CostWeights w = weights_per_segment.size() == 1 ? weights_per_segment[0] : weights_per_segment[i];
    w.validate();
    norms = compute_norms(domain, config, w);
    RawPath path;
    try {
      path = plan(stack, {waypoints[i], waypoints[i + 1], w, HeuristicMode::admissible}, norms);
    } catch (const BannedEndpointError& e) {
      throw BannedEndpointError(fmt::format("segment {}: {}", i, e.what()));
    } catch (const InfeasibleError& e) {
      throw InfeasibleError(fmt::format("segment {}: {}", i, e.what()));
    }
    mission.segment_metrics.push_back(evaluate(path, norms, stack.geometry(), time_model));
    mission.segment_weights.push_back(w);
    mission.segments.push_back(std::move(path));
  }
  mission.concatenated = concatenate(mission.segments);
  // E*_max and R*_max depend only on the map, so any segment's constants convert the whole route
  mission.aggregate = evaluate(mission.concatenated, norms, stack.geometry(), time_model);
  return mission;
}

std::vector<std::size_t> select_constrained(std::span<const PathDatabase> db_per_segment,
                                            const SelectionConstraints& constraints) {
  const auto& bounds = constraints.max_energy_rel;
  if (!bounds.empty() && bounds.size() != 1 && bounds.size() != db_per_segment.size()) {
    throw ConfigError(fmt::format("{} energy bounds given for {} segments", bounds.size(), db_per_segment.size()));
  }
  std::vector<std::size_t> chosen;
  chosen.reserve(db_per_segment.size());
  for (std::size_t s = 0; s < db_per_segment.size(); ++s) {
    const auto& db = db_per_segment[s];
    if (db.records.empty()) throw ConfigError(fmt::format("segment {} database is empty", s));
    const double bound = bounds.empty() ? std::numeric_limits<double>::infinity()
                                        : (bounds.size() == 1 ? bounds[0] : bounds[s]);
    const PathRecord* best = nullptr;
    for (const auto& r : db.records) {
      if (r.status != RecordStatus::ok || !(r.metrics.energy_rel <= bound)) continue;
      if (best == nullptr) {
        best = &r;
        continue;
      }
      const auto& m = r.metrics;
      const auto& b = best->metrics;
      if (m.risk_total < b.risk_total ||
          (m.risk_total == b.risk_total &&
           (m.science_total > b.science_total || (m.science_total == b.science_total && r.idx < best->idx)))) {
        best = &r;
      }
    }
    if (best == nullptr) {
      throw ConstraintInfeasibleError(
          fmt::format("segment {}: no path satisfies energy_rel <= {}", s, bound));
    }
    chosen.push_back(best->idx);
  }
  return chosen;
}

std::vector<ComparisonRow> compare_missions(const MissionPlan& a, const MissionPlan& b) {
  if (a.map_id != b.map_id) {
    throw ConfigError(fmt::format("missions planned on different maps/configs ({} vs {})", a.map_id, b.map_id));
  }
  const auto delta = [](double x, double y) {
    if (x == 0.0) return y == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), y);
    return (y - x) / x * 100.0;
  };
  const auto& ma = a.aggregate;
  const auto& mb = b.aggregate;
  const double energy_b = ma.energy_rel > 0.0 ? mb.energy_rel / ma.energy_rel * 100.0 : 0.0;
  return {
      {"Length", "km", ma.length_m / 1000.0, mb.length_m / 1000.0, delta(ma.length_m, mb.length_m)},
      {"Energy", "%", ma.energy_rel > 0.0 ? 100.0 : 0.0, energy_b, delta(ma.energy_rel, mb.energy_rel)},
      {"Risk", "%", ma.risk_total * 100.0, mb.risk_total * 100.0, delta(ma.risk_total, mb.risk_total)},
      {"Science", "%", ma.science_total * 100.0, mb.science_total * 100.0, delta(ma.science_total, mb.science_total)},
  };
}

std::string format_delta(double delta_pct) {
  if (!std::isfinite(delta_pct)) return "n/a";
  return fmt::format("{:+.1f}%", delta_pct);
}

std::string render_comparison(std::span<const ComparisonRow> rows, std::string_view label_a, std::string_view label_b) {
  std::string out = fmt::format("{:<8} {:<5} | {:>12} {:>12} | {:>8}\n", "", "", label_a, label_b, "Delta");
  for (const auto& r : rows) {
    out += fmt::format("{:<8} {:<5} | {:>12.4g} {:>12.4g} | {:>8}\n", r.name, "[" + r.unit + "]", r.a, r.b,
                       format_delta(r.delta_pct));
  }
  return out;
}

namespace {

CostWeights weights_from(const std::string& text) {
  const auto v = parse_double_list(text);
  if (v.size() != 3) throw ConfigError(fmt::format("weights '{}' need three values", text));
  return CostWeights::checked(v[0], v[1], v[2]);
}

}  // namespace

MissionSpec parse_mission_spec(const KeyValueFile& kv) {
  kv.require_known({"dem", "rock", "science", "banned", "cost_config", "out", "waypoint", "waypoint_world",
                    "segment_weights", "max_energy_rel", "baseline_weights", "steps", "epsilon"});
  MissionSpec spec;
  const auto path_of = [&](std::string_view key) -> std::optional<std::filesystem::path> {
    if (auto v = kv.get(key)) return kv.resolve(*v);
    return std::nullopt;
  };
  spec.dem = path_of("dem");
  spec.rock = path_of("rock");
  spec.science = path_of("science");
  spec.banned = path_of("banned");
  spec.cost_config = path_of("cost_config");
  spec.out = path_of("out");

  for (const auto& w : kv.get_all("waypoint")) {
    const auto v = parse_double_list(w);
    if (v.size() != 2 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1])) {
      throw ConfigError(fmt::format("waypoint '{}' must be 'row,col'", w));
    }
    spec.waypoints.push_back({static_cast<int>(v[0]), static_cast<int>(v[1])});
  }
  for (const auto& w : kv.get_all("waypoint_world")) {
    const auto v = parse_double_list(w);
    if (v.size() != 2) throw ConfigError(fmt::format("waypoint_world '{}' must be 'x,y'", w));
    spec.world_waypoints.emplace_back(v[0], v[1]);
  }
  if (!spec.waypoints.empty() && !spec.world_waypoints.empty()) {
    throw ConfigError("use either 'waypoint' or 'waypoint_world', not both");
  }
  if (spec.waypoints.size() + spec.world_waypoints.size() < 2) throw ConfigError("a mission needs at least two waypoints");

  for (const auto& w : kv.get_all("segment_weights")) spec.segment_weights.push_back(weights_from(w));
  if (auto b = kv.get("baseline_weights")) spec.baseline_weights = weights_from(*b);

  const auto bounds = kv.get_all("max_energy_rel");
  for (const auto& b : bounds) {
    if (b == "baseline") {
      spec.energy_bound_from_baseline = true;
    } else if (b == "inf") {
      spec.max_energy_rel.push_back(std::numeric_limits<double>::infinity());
    } else {
      for (double v : parse_double_list(b)) spec.max_energy_rel.push_back(v);
    }
  }
  spec.constrained = !bounds.empty();
  if (spec.constrained && !spec.segment_weights.empty()) {
    throw ConfigError("give either 'segment_weights' or a 'max_energy_rel' constraint, not both");
  }
  if (!spec.constrained && spec.segment_weights.empty()) {
    throw ConfigError("mission needs 'segment_weights' or a 'max_energy_rel' constraint");
  }
  if (spec.energy_bound_from_baseline && !spec.baseline_weights) {
    throw ConfigError("'max_energy_rel = baseline' requires 'baseline_weights'");
  }
  if (spec.energy_bound_from_baseline && !spec.max_energy_rel.empty()) {
    throw ConfigError("'max_energy_rel = baseline' cannot be mixed with numeric bounds");
  }
  const double steps = kv.get_double("steps", 10.0);
  if (steps < 2 || steps != std::floor(steps)) throw ConfigError("steps must be an integer >= 2");
  spec.steps = static_cast<std::size_t>(steps);
  spec.epsilon = kv.get_double("epsilon", spec.epsilon);
  return spec;
}

std::vector<Cell> resolve_waypoints(const MissionSpec& spec, const GridGeometry& geometry) {
  if (!spec.waypoints.empty()) {
    for (const auto& c : spec.waypoints) {
      if (!geometry.contains(c)) throw ConfigError(fmt::format("waypoint ({}, {}) outside the grid", c.row, c.col));
    }
    return spec.waypoints;
  }
  std::vector<Cell> cells;
  for (const auto& [x, y] : spec.world_waypoints) {
    const auto c = geometry.cell_at(x, y);
    if (!c) throw ConfigError(fmt::format("waypoint ({}, {}) outside the grid", x, y));
    cells.push_back(*c);
  }
  return cells;
}

}  // namespace moplan
