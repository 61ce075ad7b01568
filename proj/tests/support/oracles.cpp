#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "moplan/random.hpp"
#include "moplan/synth.hpp"

namespace moplan::testing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Entry = std::pair<double, std::size_t>;
using MinHeap = std::priority_queue<Entry, std::vector<Entry>, std::greater<>>;

}  // namespace

MapStack make_stack(int rows, int cols, double cell_size, const std::function<double(int, int)>& elevation,
                    const std::function<double(int, int)>& rock, const std::function<double(int, int)>& interest,
                    const std::function<bool(int, int)>& user_banned, const BanThresholds& thresholds) {
  const GridGeometry g{rows, cols, cell_size, 0.0, 0.0, -9999.0};
  auto fill = [&](LayerKind kind, const std::function<double(int, int)>& fn) {
    MapLayer layer = MapLayer::filled(kind, g, 0.0);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) layer.values[g.index({r, c})] = fn(r, c);
    }
    return layer;
  };
  std::vector<MapLayer> layers{fill(LayerKind::elevation, elevation)};
  if (rock) layers.push_back(fill(LayerKind::rock_abundance, rock));
  if (interest) layers.push_back(fill(LayerKind::scientific_interest, interest));
  if (user_banned) {
    layers.push_back(fill(LayerKind::banned, [&](int r, int c) { return user_banned(r, c) ? 1.0 : 0.0; }));
  }
  return assemble_stack(std::move(layers), thresholds);
}

MapStack flat_stack(int rows, int cols, double cell_size) {
  return make_stack(rows, cols, cell_size, [](int, int) { return 0.0; });
}

MapStack corpus_map(std::uint64_t seed, int size) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  SynthParams p;
  p.rows = p.cols = size;
  p.seed = seed;
  p.cell_size = uniform(rng, 1.0, 10.0);
  p.roughness = uniform(rng, 0.2, 1.2);
  p.rock_density = uniform(rng, 0.0, 1.5);
  p.hotspots = static_cast<int>(uniform_index(rng, 5));
  p.octaves = 4;
  return assemble_synth(synthesize(p));
}

CostWeights random_weights(std::mt19937_64& rng) {
  // uniform on the simplex: sorted uniforms as cut points
  double a = uniform01(rng);
  double b = uniform01(rng);
  if (a > b) std::swap(a, b);
  CostWeights w{a, b - a, 0.0};
  w.alpha3 = 1.0 - w.alpha1 - w.alpha2;
  if (w.alpha3 < 0.0) w.alpha3 = 0.0;
  return w;
}

Cell random_free_cell(const MapStack& stack, std::mt19937_64& rng) {
  const auto& g = stack.geometry();
  while (true) {
    const Cell c{static_cast<int>(uniform_index(rng, g.n_rows)), static_cast<int>(uniform_index(rng, g.n_cols))};
    if (!stack.banned(c)) return c;
  }
}

std::vector<double> forward_dijkstra(const MapStack& stack, Cell start, const CostWeights& weights,
                                     const NormalizationConstants& norms) {
  const auto& g = stack.geometry();
  std::vector<double> dist(g.cell_count(), kInf);
  if (stack.banned(start)) return dist;
  MinHeap heap;
  dist[g.index(start)] = 0.0;
  heap.push({0.0, g.index(start)});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    const Cell cu = g.cell(u);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const Cell cv{cu.row + dr, cu.col + dc};
        if ((dr == 0 && dc == 0) || !g.contains(cv) || stack.banned(cv)) continue;
        const double nd = d + edge_cost(stack, cu, cv, weights, norms).weighted_total;
        const std::size_t v = g.index(cv);
        if (nd < dist[v]) {
          dist[v] = nd;
          heap.push({nd, v});
        }
      }
    }
  }
  return dist;
}

std::vector<double> reverse_dijkstra(const MapStack& stack, Cell goal, const CostWeights& weights,
                                     const NormalizationConstants& norms) {
  const auto& g = stack.geometry();
  std::vector<double> dist(g.cell_count(), kInf);
  if (stack.banned(goal)) return dist;
  MinHeap heap;
  dist[g.index(goal)] = 0.0;
  heap.push({0.0, g.index(goal)});
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    const Cell cv = g.cell(v);
    // relax every predecessor u with the forward edge u -> v
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const Cell cu{cv.row + dr, cv.col + dc};
        if ((dr == 0 && dc == 0) || !g.contains(cu) || stack.banned(cu)) continue;
        const double nd = d + edge_cost(stack, cu, cv, weights, norms).weighted_total;
        const std::size_t u = g.index(cu);
        if (nd < dist[u]) {
          dist[u] = nd;
          heap.push({nd, u});
        }
      }
    }
  }
  return dist;
}

GridExtrema brute_force_extrema(const PolynomialCoeffs& coeffs, double s_lo, double s_hi, double r_lo, double r_hi,
                                double ds, double dr) {
  const auto ns = static_cast<long>(std::ceil((s_hi - s_lo) / ds - 1e-9));
  const auto nr = static_cast<long>(std::ceil((r_hi - r_lo) / dr - 1e-9));
  GridExtrema out{kInf, -kInf};
  for (long i = 0; i <= ns; ++i) {
    const double s = i == ns ? s_hi : s_lo + static_cast<double>(i) * ds;
    for (long j = 0; j <= nr; ++j) {
      const double r = j == nr ? r_hi : r_lo + static_cast<double>(j) * dr;
      const double v = coeffs(s, r);
      out.min = std::min(out.min, v);
      out.max = std::max(out.max, v);
    }
  }
  return out;
}

double grid_min_gap(const PolynomialCoeffs& coeffs, double s_lo, double s_hi, double r_lo, double r_hi, double ds,
                    double dr) {
  const auto& p = coeffs.p;
  const double s_abs = std::max(std::abs(s_lo), std::abs(s_hi));
  const double r_abs = std::max(std::abs(r_lo), std::abs(r_hi));
  const double grad_s = std::abs(p[1]) + 2.0 * std::abs(p[3]) * s_abs + std::abs(p[4]) * r_abs;
  const double grad_r = std::abs(p[2]) + std::abs(p[4]) * s_abs + 2.0 * std::abs(p[5]) * r_abs;
  // second-order remainder covers curvature across the half step
  const double hs = ds / 2.0;
  const double hr = dr / 2.0;
  return grad_s * hs + grad_r * hr + std::abs(p[3]) * hs * hs + std::abs(p[4]) * hs * hr + std::abs(p[5]) * hr * hr;
}

}  // namespace moplan::testing
