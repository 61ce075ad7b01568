#include "moplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <fmt/format.h>

#include "moplan/errors.hpp"

namespace moplan {

namespace {

struct QueueEntry {
  double f;
  double g;
  std::uint64_t sequence;
  std::size_t index;
};

// std::priority_queue is a max-heap; "greater" puts the smallest (f, g, sequence) on top.
struct EntryGreater {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g > b.g;
    return a.sequence > b.sequence;
  }
};

void check_endpoint(const MapStack& stack, Cell c, std::string_view what) {
  if (!stack.geometry().contains(c)) {
    throw RangeError(fmt::format("{} ({}, {}) is outside the {}x{} grid", what, c.row, c.col, stack.geometry().n_rows,
                                 stack.geometry().n_cols));
  }
  if (stack.banned(c)) throw BannedEndpointError(fmt::format("{} ({}, {}) is banned", what, c.row, c.col));
}

}  // namespace

std::string_view to_string(HeuristicMode mode) { return mode == HeuristicMode::zero ? "zero" : "admissible"; }

HeuristicMode parse_heuristic_mode(std::string_view text) {
  if (text == "admissible") return HeuristicMode::admissible;
  if (text == "zero") return HeuristicMode::zero;
  throw ConfigError(fmt::format("unknown heuristic '{}', expected admissible or zero", text));
}

double heuristic(const GridGeometry& geometry, Cell cell, Cell goal, const NormalizationConstants& norms) {
  const double dr = cell.row - goal.row;
  const double dc = cell.col - goal.col;
  return norms.h_min_per_meter * std::hypot(dr, dc) * geometry.cell_size;
}

PlanResult plan_with_stats(const MapStack& stack, const PlanRequest& request, const NormalizationConstants& norms,
                           const PlanOptions& options) {
  check_endpoint(stack, request.start, "start");
  check_endpoint(stack, request.goal, "goal");

  const auto& geometry = stack.geometry();
  const std::size_t n = geometry.cell_count();
  const bool use_h = request.heuristic_mode == HeuristicMode::admissible;
  const auto h = [&](Cell c) { return use_h ? heuristic(geometry, c, request.goal, norms) : 0.0; };

  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, kNoParent);
  std::vector<std::uint8_t> closed(n, 0);
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, EntryGreater> open;

  PlanResult result;
  std::uint64_t sequence = 0;
  const std::size_t start = geometry.index(request.start);
  const std::size_t goal = geometry.index(request.goal);
  g[start] = 0.0;
  open.push({h(request.start), 0.0, sequence++, start});
  ++result.stats.pushed;

  bool reached = false;
  while (!open.empty()) {
    const QueueEntry top = open.top();
    open.pop();
    if (closed[top.index] || top.g > g[top.index]) continue;
    closed[top.index] = 1;
    ++result.stats.expanded;
    const Cell cell = geometry.cell(top.index);
    if (options.record_expansions) result.stats.expansion_order.push_back(cell);
    if (top.index == goal) {
      reached = true;
      break;
    }
    for (const auto& dir : kDirections) {
      const Cell next{cell.row + dir.d_row, cell.col + dir.d_col};
      if (!geometry.contains(next) || stack.banned(next)) continue;
      const std::size_t ni = geometry.index(next);
      if (closed[ni]) continue;
      const double candidate = top.g + edge_cost(stack, cell, next, request.weights, norms).weighted_total;
      if (candidate < g[ni]) {
        g[ni] = candidate;
        parent[ni] = top.index;
        open.push({candidate + h(next), candidate, sequence++, ni});
        ++result.stats.pushed;
      }
    }
  }
  if (!reached) {
    throw InfeasibleError(fmt::format("no feasible path from ({}, {}) to ({}, {})", request.start.row,
                                      request.start.col, request.goal.row, request.goal.col));
  }
  result.path = reconstruct(stack, parent, request.goal, request.weights, norms);
  return result;
}

RawPath plan(const MapStack& stack, const PlanRequest& request, const NormalizationConstants& norms) {
  return plan_with_stats(stack, request, norms).path;
}

RawPath reconstruct(const MapStack& stack, std::span<const std::size_t> parents, Cell goal, const CostWeights& weights,
                    const NormalizationConstants& norms) {
  const auto& geometry = stack.geometry();
  if (parents.size() != geometry.cell_count() || !geometry.contains(goal)) {
    throw InternalError("parent map does not match the grid");
  }
  RawPath path;
  std::size_t current = geometry.index(goal);
  path.cells.push_back(goal);
  while (parents[current] != kNoParent) {
    const std::size_t prev = parents[current];
    if (prev >= parents.size()) throw InternalError("parent index out of range");
    if (path.cells.size() > geometry.cell_count()) throw InternalError("cycle in parent map");
    const Cell prev_cell = geometry.cell(prev);
    if (!are_neighbors(prev_cell, path.cells.back())) throw InternalError("parent link joins non-adjacent cells");
    path.cells.push_back(prev_cell);
    current = prev;
  }
  std::reverse(path.cells.begin(), path.cells.end());

  path.edges.reserve(path.cells.size() - 1);
  path.node_science.reserve(path.cells.size());
  path.node_science.push_back(science_cost(stack.interest(path.cells.front())));
  for (std::size_t i = 1; i < path.cells.size(); ++i) {
    path.edges.push_back(edge_cost(stack, path.cells[i - 1], path.cells[i], weights, norms));
    path.total_cost += path.edges.back().weighted_total;
    path.node_science.push_back(science_cost(stack.interest(path.cells[i])));
  }
  return path;
}

}  // namespace moplan
