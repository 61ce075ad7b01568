#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "moplan/cost_model.hpp"
#include "moplan/planner.hpp"

namespace moplan {

/// How long the robot needs for one edge when converting energy cost back to squared torque * time.
enum class TraversalTime {
  from_velocity,   // t = edge length / velocity
  fixed_sim_grid,  // t = 10 s for axis edges, 10*sqrt(2) s for diagonals, regardless of cell size
};

std::string_view to_string(TraversalTime model);
/// Accepts "velocity" and "fixed_sim_grid" (or "fixed"); throws ConfigError otherwise.
TraversalTime parse_time_model(std::string_view text);

struct ComponentCosts {
  double energy = 0.0;
  double risk = 0.0;
  double science = 0.0;
};

struct PathMetrics {
  double length_m = 0.0;
  double energy_rel = 0.0;     // sum of E_i * E*_max * t_i
  double risk_total = 0.0;     // probability of crashing somewhere along the path
  double science_total = 0.0;  // mean scientific interest of visited nodes
  ComponentCosts component_costs;  // summed dimensionless edge costs
};

PathMetrics evaluate(const RawPath& path, const NormalizationConstants& norms, const GridGeometry& geometry,
                     TraversalTime time_model = TraversalTime::from_velocity);

/// 1 - prod(1 - p_i), evaluated as 1 - exp(sum log1p(-p_i)).
double compose_risk(std::span<const double> probabilities);

/// energy_rel of every entry as a percentage of metrics[reference].energy_rel. Throws RangeError on a zero reference.
std::vector<double> relative_energy_scaling(std::span<const PathMetrics> metrics, std::size_t reference);

}  // namespace moplan
