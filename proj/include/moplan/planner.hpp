#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "moplan/cost_model.hpp"
#include "moplan/raster_map.hpp"

namespace moplan {

enum class HeuristicMode { admissible, zero };

std::string_view to_string(HeuristicMode mode);
HeuristicMode parse_heuristic_mode(std::string_view text);

struct PlanRequest {
  Cell start;
  Cell goal;
  CostWeights weights;
  HeuristicMode heuristic_mode = HeuristicMode::admissible;
};

struct RawPath {
  std::vector<Cell> cells;                     // start .. goal
  std::vector<EdgeCostBreakdown> edges;        // edges[i] joins cells[i] -> cells[i + 1]
  std::vector<double> node_science;            // science cost of every cell, start included
  double total_cost = 0.0;
};

struct SearchStats {
  std::size_t expanded = 0;  // nodes moved to the closed set
  std::size_t pushed = 0;
  std::vector<Cell> expansion_order;  // filled when PlanOptions::record_expansions is set
};

struct PlanOptions {
  bool record_expansions = false;
};

struct PlanResult {
  RawPath path;
  SearchStats stats;
};

inline constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

/// h_min_per_meter times the Euclidean distance between cell centers.
double heuristic(const GridGeometry& geometry, Cell cell, Cell goal, const NormalizationConstants& norms);

/// A* over the 8-connected grid. Pops by (f, g, insertion order); neighbors in N, NE, ..., NW order;
/// closed set without re-opening. HeuristicMode::zero is Dijkstra.
/// Throws BannedEndpointError, InfeasibleError (goal unreachable) or RangeError (endpoint out of bounds).
PlanResult plan_with_stats(const MapStack& stack, const PlanRequest& request, const NormalizationConstants& norms,
                           const PlanOptions& options = {});
RawPath plan(const MapStack& stack, const PlanRequest& request, const NormalizationConstants& norms);

/// Walks parent links (kNoParent terminates) from goal back to the start and recomputes per-edge costs.
/// Throws InternalError on a cycle, a non-adjacent link or an out-of-range parent.
RawPath reconstruct(const MapStack& stack, std::span<const std::size_t> parents, Cell goal, const CostWeights& weights,
                    const NormalizationConstants& norms);

}  // namespace moplan
