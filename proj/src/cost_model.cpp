#include "moplan/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <fmt/format.h>

#include "moplan/errors.hpp"
#include "moplan/keyvalue.hpp"

namespace moplan {

namespace {

constexpr double kWeightSumTolerance = 1e-12;

PolynomialCoeffs coeffs_from(const KeyValueFile& kv, std::string_view key, const PolynomialCoeffs& fallback) {
  const auto values = kv.get_doubles(key);
  if (values.empty()) return fallback;
  if (values.size() != 6) throw ConfigError(fmt::format("{}: '{}' needs six coefficients", kv.source(), key));
  PolynomialCoeffs c;
  std::copy(values.begin(), values.end(), c.p.begin());
  return c;
}

}  // namespace

void CostConfig::validate() const {
  for (const auto* poly : {&energy, &crash}) {
    for (double v : poly->p) {
      if (!std::isfinite(v)) throw ConfigError("polynomial coefficients must be finite");
    }
  }
  if (!(d_sim > 0.0)) throw ConfigError(fmt::format("d_sim must be positive, got {}", d_sim));
  if (!(velocity > 0.0)) throw ConfigError(fmt::format("velocity must be positive, got {}", velocity));
  if (!(max_slope_deg >= 0.0 && max_slope_deg <= 90.0)) {
    throw ConfigError(fmt::format("max_slope must be in [0, 90] degrees, got {}", max_slope_deg));
  }
  if (!(max_rock >= 0.0 && max_rock <= 1.0)) throw ConfigError(fmt::format("max_rock must be in [0, 1], got {}", max_rock));
}

CostConfig parse_cost_config(const KeyValueFile& kv) {
  kv.require_known({"energy_coeffs", "crash_coeffs", "d_sim", "velocity", "max_slope", "max_rock"});
  CostConfig c;
  c.energy = coeffs_from(kv, "energy_coeffs", c.energy);
  c.crash = coeffs_from(kv, "crash_coeffs", c.crash);
  c.d_sim = kv.get_double("d_sim", c.d_sim);
  c.velocity = kv.get_double("velocity", c.velocity);
  c.max_slope_deg = kv.get_double("max_slope", c.max_slope_deg);
  c.max_rock = kv.get_double("max_rock", c.max_rock);
  c.validate();
  return c;
}

CostConfig load_cost_config(const std::filesystem::path& path) { return parse_cost_config(KeyValueFile::load(path)); }

std::string echo_cost_config(const CostConfig& c) {
  const auto& e = c.energy.p;
  const auto& r = c.crash.p;
  return fmt::format(
      "energy_coeffs = {},{},{},{},{},{}\ncrash_coeffs = {},{},{},{},{},{}\nd_sim = {}\nvelocity = {}\nmax_slope = "
      "{}\nmax_rock = {}\n",
      e[0], e[1], e[2], e[3], e[4], e[5], r[0], r[1], r[2], r[3], r[4], r[5], c.d_sim, c.velocity, c.max_slope_deg,
      c.max_rock);
}

void CostWeights::validate() const {
  for (double a : {alpha1, alpha2, alpha3}) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw ConfigError(fmt::format("weights must lie in [0, 1], got ({}, {}, {})", alpha1, alpha2, alpha3));
    }
  }
  if (std::abs(alpha1 + alpha2 + alpha3 - 1.0) > kWeightSumTolerance) {
    throw ConfigError(fmt::format("weights must sum to 1, got ({}, {}, {})", alpha1, alpha2, alpha3));
  }
}

CostWeights CostWeights::checked(double a1, double a2, double a3) {
  CostWeights w{a1, a2, a3};
  w.validate();
  return w;
}

double energy_raw(double s, double r, double d, const PolynomialCoeffs& coeffs, double d_sim) {
  return std::max(coeffs(s, r), kEnergyFloor) * d / d_sim;
}

double energy_cost(double s, double r, double d, const NormalizationConstants& norms) {
  return energy_raw(s, r, d, norms.energy, norms.d_sim) / norms.e_star_max;
}

double crash_rate_raw(double s, double r, const PolynomialCoeffs& coeffs) { return std::clamp(coeffs(s, r), 0.0, 1.0); }

double scale_crash_probability(double raw, double d, double d_sim) {
  if (raw >= 1.0) return 1.0;
  // 1 - (1 - raw)^(d/d_sim), without cancellation for small raw
  return -std::expm1(d / d_sim * std::log1p(-raw));
}

double crash_rate_scaled(double s, double r, double d, const NormalizationConstants& norms) {
  return scale_crash_probability(crash_rate_raw(s, r, norms.crash), d, norms.d_sim);
}

double risk_cost(double s, double r, double d, const NormalizationConstants& norms) {
  if (norms.r_star_max <= 0.0) return 0.0;
  return crash_rate_scaled(s, r, d, norms) / norms.r_star_max;
}

double invert_risk_cost(double risk, double d, const NormalizationConstants& norms) {
  const double scaled = risk * norms.r_star_max;
  if (scaled >= 1.0) return 1.0;
  return -std::expm1(norms.d_sim / d * std::log1p(-scaled));
}

EdgeCostBreakdown edge_cost(const MapStack& stack, Cell from, Cell to, const CostWeights& weights,
                            const NormalizationConstants& norms) {
  EdgeCostBreakdown out;
  out.slope_deg = edge_slope(stack, from, to);  // throws on non-adjacent cells
  out.length_m = stack.geometry().distance(from, to);
  if (stack.banned(to)) {
    out.banned = banned_cost(true);
    out.weighted_total = out.banned;
    return out;
  }
  const double rock = stack.rock(to);
  out.energy = energy_cost(out.slope_deg, rock, out.length_m, norms);
  out.risk = risk_cost(out.slope_deg, rock, out.length_m, norms);
  out.science = science_cost(stack.interest(to));
  out.weighted_total = weights.alpha1 * out.energy + weights.alpha2 * out.risk + weights.alpha3 * out.science;
  return out;
}

QuadraticExtrema quadratic_extrema(const PolynomialCoeffs& c, double s_lo, double s_hi, double r_lo, double r_hi) {
  const auto& p = c.p;
  std::vector<std::pair<double, double>> candidates{{s_lo, r_lo}, {s_lo, r_hi}, {s_hi, r_lo}, {s_hi, r_hi}};
  const auto inside_s = [&](double s) { return s >= s_lo && s <= s_hi; };
  const auto inside_r = [&](double r) { return r >= r_lo && r <= r_hi; };

  // d/ds = p1 + 2 p3 s + p4 r along r = const edges
  if (p[3] != 0.0) {
    for (double r : {r_lo, r_hi}) {
      const double s = -(p[1] + p[4] * r) / (2.0 * p[3]);
      if (inside_s(s)) candidates.emplace_back(s, r);
    }
  }
  // d/dr = p2 + p4 s + 2 p5 r along s = const edges
  if (p[5] != 0.0) {
    for (double s : {s_lo, s_hi}) {
      const double r = -(p[2] + p[4] * s) / (2.0 * p[5]);
      if (inside_r(r)) candidates.emplace_back(s, r);
    }
  }
  // interior: [2p3 p4; p4 2p5] [s; r] = -[p1; p2]
  const double det = 4.0 * p[3] * p[5] - p[4] * p[4];
  if (det != 0.0) {
    const double s = (-p[1] * 2.0 * p[5] + p[2] * p[4]) / det;
    const double r = (-p[2] * 2.0 * p[3] + p[1] * p[4]) / det;
    if (inside_s(s) && inside_r(r)) candidates.emplace_back(s, r);
  }

  QuadraticExtrema out{c(candidates.front().first, candidates.front().second),
                       c(candidates.front().first, candidates.front().second)};
  for (const auto& [s, r] : candidates) {
    const double v = c(s, r);
    out.min = std::min(out.min, v);
    out.max = std::max(out.max, v);
  }
  return out;
}

CostDomain feasible_domain(const MapStack& stack) {
  const auto& g = stack.geometry();
  CostDomain domain;
  domain.cell_size = g.cell_size;
  bool any = false;
  for (int r = 0; r < g.n_rows; ++r) {
    for (int c = 0; c < g.n_cols; ++c) {
      const Cell cell{r, c};
      if (stack.banned(cell)) continue;
      const double rock = stack.rock(cell);
      if (!any) {
        domain.rock_lo = domain.rock_hi = rock;
        any = true;
      } else {
        domain.rock_lo = std::min(domain.rock_lo, rock);
        domain.rock_hi = std::max(domain.rock_hi, rock);
      }
      // each undirected edge once: E, SE, S, SW
      for (std::size_t d = 2; d <= 5; ++d) {
        const Cell other{r + kDirections[d].d_row, c + kDirections[d].d_col};
        if (!g.contains(other) || stack.banned(other)) continue;
        domain.slope_limit = std::max(domain.slope_limit, std::abs(edge_slope(stack, cell, other)));
      }
    }
  }
  if (!any) throw InfeasibleError("every cell of the map is banned");
  return domain;
}

NormalizationConstants compute_norms(const CostDomain& domain, const CostConfig& config, const CostWeights& weights) {
  NormalizationConstants n;
  n.d_sim = config.d_sim;
  n.velocity = config.velocity;
  n.cell_size = domain.cell_size;
  n.domain = domain;
  n.energy = config.energy;
  n.crash = config.crash;

  const double axis = domain.cell_size;
  const double diagonal = std::numbers::sqrt2 * domain.cell_size;
  const double s = domain.slope_limit;

  const auto e = quadratic_extrema(config.energy, -s, s, domain.rock_lo, domain.rock_hi);
  const double e_poly_max = std::max(e.max, kEnergyFloor);
  const double e_poly_min = std::max(e.min, kEnergyFloor);
  n.e_star_max = e_poly_max * diagonal / config.d_sim;
  n.e_star_min = e_poly_min * diagonal / config.d_sim;

  const auto c = quadratic_extrema(config.crash, -s, s, domain.rock_lo, domain.rock_hi);
  const double c_max = std::clamp(c.max, 0.0, 1.0);
  const double c_min = std::clamp(c.min, 0.0, 1.0);
  n.r_star_max = scale_crash_probability(c_max, diagonal, config.d_sim);
  n.r_star_min = scale_crash_probability(c_min, diagonal, config.d_sim);

  n.energy_min_edge = e_poly_min * axis / config.d_sim / n.e_star_max;
  double risk_per_meter = 0.0;
  if (n.r_star_max > 0.0) {
    n.risk_min_edge = scale_crash_probability(c_min, axis, config.d_sim) / n.r_star_max;
    // the scaled crash probability is concave in distance, so diagonals are cheaper per meter
    const double diag_per_meter = scale_crash_probability(c_min, diagonal, config.d_sim) / n.r_star_max / diagonal;
    risk_per_meter = std::min(n.risk_min_edge / axis, diag_per_meter);
  }
  n.h_min_per_meter = weights.alpha1 * n.energy_min_edge / axis + weights.alpha2 * risk_per_meter;
  return n;
}

NormalizationConstants compute_norms(const MapStack& stack, const CostConfig& config, const CostWeights& weights) {
  return compute_norms(feasible_domain(stack), config, weights);
}

}  // namespace moplan
