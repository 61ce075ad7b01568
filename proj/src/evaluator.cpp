#include "moplan/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "moplan/errors.hpp"

namespace moplan {

std::string_view to_string(TraversalTime model) {
  return model == TraversalTime::from_velocity ? "velocity" : "fixed_sim_grid";
}

TraversalTime parse_time_model(std::string_view text) {
  if (text == "velocity") return TraversalTime::from_velocity;
  if (text == "fixed_sim_grid" || text == "fixed") return TraversalTime::fixed_sim_grid;
  throw ConfigError(fmt::format("unknown time model '{}' (expected velocity or fixed_sim_grid)", text));
}

double compose_risk(std::span<const double> probabilities) {
  double log_survival = 0.0;
  for (double p : probabilities) log_survival += std::log1p(-p);
  return -std::expm1(log_survival);
}

PathMetrics evaluate(const RawPath& path, const NormalizationConstants& norms, const GridGeometry& geometry,
                     TraversalTime time_model) {
  PathMetrics m;
  std::vector<double> crash;
  crash.reserve(path.edges.size());
  for (const auto& e : path.edges) {
    m.length_m += e.length_m;
    double t = e.length_m / norms.velocity;
    if (time_model == TraversalTime::fixed_sim_grid) {
      t = e.length_m > geometry.cell_size * 1.0000001 ? 10.0 * std::numbers::sqrt2 : 10.0;
    }
    m.energy_rel += e.energy * norms.e_star_max * t;
    crash.push_back(std::min(e.risk * norms.r_star_max, 1.0));
    m.component_costs.energy += e.energy;
    m.component_costs.risk += e.risk;
    m.component_costs.science += e.science;
  }
  m.risk_total = compose_risk(crash);

  double science_sum = 0.0;
  for (double s : path.node_science) science_sum += s;
  m.science_total = path.node_science.empty() ? 0.0 : 1.0 - science_sum / static_cast<double>(path.node_science.size());
  return m;
}

std::vector<double> relative_energy_scaling(std::span<const PathMetrics> metrics, std::size_t reference) {
  if (reference >= metrics.size()) throw RangeError(fmt::format("reference index {} out of range", reference));
  const double ref = metrics[reference].energy_rel;
  if (!(ref > 0.0)) throw RangeError("reference path has zero relative energy");
  std::vector<double> out;
  out.reserve(metrics.size());
  for (const auto& m : metrics) out.push_back(m.energy_rel / ref * 100.0);
  return out;
}

}  // namespace moplan
