#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "moplan/evaluator.hpp"
#include "moplan/planner.hpp"
#include "moplan/sweep.hpp"

namespace moplan {

class KeyValueFile;

struct MissionPlan {
  std::string map_id;
  std::vector<Cell> waypoints;
  std::vector<CostWeights> segment_weights;
  std::vector<RawPath> segments;
  std::vector<PathMetrics> segment_metrics;
  RawPath concatenated;  // shared waypoint cells appear once
  PathMetrics aggregate;
};

/// Plans every consecutive waypoint pair independently. `weights_per_segment` holds one triple per
/// segment, or a single triple used for all of them. Throws InfeasibleError naming the failing segment.
MissionPlan plan_mission(const MapStack& stack, const CostConfig& config, std::span<const Cell> waypoints,
                         std::span<const CostWeights> weights_per_segment,
                         TraversalTime time_model = TraversalTime::from_velocity);

/// Joins segment paths end to start; throws RangeError if a segment does not start where the previous ended.
RawPath concatenate(std::span<const RawPath> segments);

struct SelectionConstraints {
  /// Upper bound on energy_rel per segment (a single entry applies to every segment). Empty = unbounded.
  std::vector<double> max_energy_rel;
};

/// Per segment: keep successful records with energy_rel <= bound, then minimal risk_total, then maximal
/// science_total, then lowest record idx. Returns the chosen record idx per segment.
/// Throws ConstraintInfeasibleError when a segment has no record within its bound.
std::vector<std::size_t> select_constrained(std::span<const PathDatabase> db_per_segment,
                                            const SelectionConstraints& constraints);

struct ComparisonRow {
  std::string name;
  std::string unit;
  double a = 0.0;
  double b = 0.0;
  double delta_pct = 0.0;  // (b - a) / a * 100
};

/// Length [km], Energy [% of a], Risk [%], Science [%]. Throws ConfigError if the plans come from different maps.
std::vector<ComparisonRow> compare_missions(const MissionPlan& a, const MissionPlan& b);
std::string format_delta(double delta_pct);
std::string render_comparison(std::span<const ComparisonRow> rows, std::string_view label_a = "Reference",
                              std::string_view label_b = "Candidate");

/// Contents of a mission specification file.
struct MissionSpec {
  std::optional<std::filesystem::path> dem, rock, science, banned, cost_config;
  std::optional<std::filesystem::path> out;
  std::vector<Cell> waypoints;                             // from `waypoint = row,col`
  std::vector<std::pair<double, double>> world_waypoints;  // from `waypoint_world = x,y`
  std::vector<CostWeights> segment_weights;                // explicit mode
  bool constrained = false;  // sweep each segment and select under constraints
  std::vector<double> max_energy_rel;  // +inf when unbounded
  bool energy_bound_from_baseline = false;
  std::optional<CostWeights> baseline_weights;
  std::size_t steps = 10;
  double epsilon = 1e-2;
};

MissionSpec parse_mission_spec(const KeyValueFile& kv);
/// Cell waypoints, or world waypoints mapped onto the grid. Throws ConfigError for points outside it.
std::vector<Cell> resolve_waypoints(const MissionSpec& spec, const GridGeometry& geometry);

}  // namespace moplan
