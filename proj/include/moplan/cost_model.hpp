#pragma once

#include <array>
#include <filesystem>
#include <limits>
#include <string>

#include "moplan/raster_map.hpp"

namespace moplan {

class KeyValueFile;

/// Quadratic surface p0 + p1*s + p2*r + p3*s^2 + p4*s*r + p5*r^2 in slope s [deg] and rock abundance r.
struct PolynomialCoeffs {
  std::array<double, 6> p{};

  double operator()(double s, double r) const {
    return p[0] + p[1] * s + p[2] * r + p[3] * s * s + p[4] * s * r + p[5] * r * r;
  }

  /// Squared torque of a quadruped over one simulation cell.
  static PolynomialCoeffs squared_torque() { return {{803.0, 10.5, 70.3, 0.739, -1.42, 1770.0}}; }
  /// Crash probability over one simulation cell.
  static PolynomialCoeffs crash_rate() { return {{-2.88e-2, 5.31e-4, 0.319, 3.14e-4, -2.3e-2, 10.8}}; }
};

/// Robot model and feasibility limits. Defaults describe the quadruped used for lunar traverses.
struct CostConfig {
  PolynomialCoeffs energy = PolynomialCoeffs::squared_torque();
  PolynomialCoeffs crash = PolynomialCoeffs::crash_rate();
  double d_sim = 8.0;     // meters covered by one simulated sample
  double velocity = 0.8;  // m/s
  double max_slope_deg = 30.0;
  double max_rock = 0.3;

  BanThresholds thresholds() const { return {max_slope_deg, max_rock}; }
  void validate() const;
};

CostConfig parse_cost_config(const KeyValueFile& kv);
CostConfig load_cost_config(const std::filesystem::path& path);
/// key = value text that parse_cost_config reads back to the same config.
std::string echo_cost_config(const CostConfig& config);

struct CostWeights {
  double alpha1 = 1.0;  // energy
  double alpha2 = 0.0;  // risk
  double alpha3 = 0.0;  // science

  /// Throws ConfigError unless every weight is in [0, 1] and they sum to 1 within 1e-12.
  void validate() const;
  static CostWeights checked(double a1, double a2, double a3);

  friend bool operator==(const CostWeights&, const CostWeights&) = default;
};

/// Feasible (unbanned) slope/rock rectangle the normalizers range over.
struct CostDomain {
  double slope_limit = 0.0;  // largest |slope| of an edge joining two unbanned cells
  double rock_lo = 0.0;
  double rock_hi = 0.0;
  double cell_size = 1.0;
};

struct NormalizationConstants {
  double e_star_max = 1.0;  // squared torque of the worst feasible diagonal edge
  double e_star_min = 1.0;  // squared torque of the best feasible diagonal edge
  double r_star_max = 0.0;  // crash probability of the worst feasible diagonal edge
  double r_star_min = 0.0;
  double energy_min_edge = 0.0;  // minimal energy cost of an axis edge
  double risk_min_edge = 0.0;    // minimal risk cost of an axis edge
  double h_min_per_meter = 0.0;
  double d_sim = 8.0;
  double velocity = 0.8;
  double cell_size = 1.0;
  CostDomain domain;
  PolynomialCoeffs energy = PolynomialCoeffs::squared_torque();
  PolynomialCoeffs crash = PolynomialCoeffs::crash_rate();
};

struct EdgeCostBreakdown {
  double energy = 0.0;
  double risk = 0.0;
  double science = 0.0;
  double banned = 0.0;  // 0 or +inf
  double weighted_total = 0.0;
  double length_m = 0.0;
  double slope_deg = 0.0;
};

inline constexpr double kEnergyFloor = 1e-9;

/// Squared torque over distance d; polynomial floored at kEnergyFloor.
double energy_raw(double s, double r, double d, const PolynomialCoeffs& coeffs, double d_sim);
double energy_cost(double s, double r, double d, const NormalizationConstants& norms);

/// Crash probability per simulation cell, clamped to [0, 1].
double crash_rate_raw(double s, double r, const PolynomialCoeffs& coeffs);
/// 1 - (1 - raw)^(d / d_sim).
double scale_crash_probability(double raw, double d, double d_sim);
double crash_rate_scaled(double s, double r, double d, const NormalizationConstants& norms);
double risk_cost(double s, double r, double d, const NormalizationConstants& norms);
/// Recovers the per-simulation-cell crash rate from a risk cost over distance d.
double invert_risk_cost(double risk, double d, const NormalizationConstants& norms);

inline double science_cost(double interest) { return 1.0 - interest; }
inline double banned_cost(bool banned) { return banned ? std::numeric_limits<double>::infinity() : 0.0; }

EdgeCostBreakdown edge_cost(const MapStack& stack, Cell from, Cell to, const CostWeights& weights,
                            const NormalizationConstants& norms);

struct QuadraticExtrema {
  double min = 0.0;
  double max = 0.0;
};

/// Exact extrema of a quadratic surface over [s_lo, s_hi] x [r_lo, r_hi]:
/// corners, per-edge stationary points and the interior stationary point.
QuadraticExtrema quadratic_extrema(const PolynomialCoeffs& coeffs, double s_lo, double s_hi, double r_lo,
                                   double r_hi);

/// Throws InfeasibleError when every cell is banned.
CostDomain feasible_domain(const MapStack& stack);

NormalizationConstants compute_norms(const CostDomain& domain, const CostConfig& config, const CostWeights& weights);
NormalizationConstants compute_norms(const MapStack& stack, const CostConfig& config, const CostWeights& weights);

}  // namespace moplan
