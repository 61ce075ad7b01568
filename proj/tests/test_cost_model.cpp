#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "moplan/cost_model.hpp"
#include "moplan/errors.hpp"
#include "moplan/keyvalue.hpp"
#include "moplan/random.hpp"
#include "support/oracles.hpp"

namespace moplan {
namespace {

using std::numbers::sqrt2;
using testing::flat_stack;
using testing::make_stack;

const PolynomialCoeffs kEnergy = PolynomialCoeffs::squared_torque();
const PolynomialCoeffs kCrash = PolynomialCoeffs::crash_rate();

TEST(EnergyRaw, ReferenceValues) {
  EXPECT_EQ(energy_raw(0.0, 0.0, 8.0, kEnergy, 8.0), 803.0);
  EXPECT_NEAR(energy_raw(10.0, 0.0, 8.0, kEnergy, 8.0), 981.9, 1e-9);
  EXPECT_EQ(energy_raw(0.0, 0.0, 16.0, kEnergy, 8.0), 1606.0);
}

TEST(EnergyRaw, LinearInDistance) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const double s = uniform(rng, -30, 30);
    const double r = uniform(rng, 0, 0.3);
    const double d = uniform(rng, 0.5, 20);
    EXPECT_NEAR(energy_raw(s, r, 3.0 * d, kEnergy, 8.0), 3.0 * energy_raw(s, r, d, kEnergy, 8.0),
                1e-12 * energy_raw(s, r, 3.0 * d, kEnergy, 8.0));
  }
}

TEST(EnergyRaw, FloorKeepsCostPositive) {
  const PolynomialCoeffs negative{{-5.0, 0, 0, 0, 0, 0}};
  EXPECT_EQ(energy_raw(0, 0, 8.0, negative, 8.0), kEnergyFloor);
}

TEST(EnergyCost, NormalizedAgainstWorstDiagonalEdge) {
  const double cell = 4.0;
  const CostDomain domain{25.0, 0.0, 0.3, cell};
  const auto norms = compute_norms(domain, CostConfig{}, {1, 0, 0});
  const double worst = 803 + 10.5 * 25 + 70.3 * 0.3 + 0.739 * 625 + (-1.42) * 7.5 + 1770 * 0.09;
  EXPECT_NEAR(norms.e_star_max, worst * sqrt2 * cell / 8.0, 1e-9);
  EXPECT_NEAR(energy_cost(0, 0, cell, norms), 803.0 / (worst * sqrt2), 1e-12);
  EXPECT_NEAR(energy_cost(25.0, 0.3, sqrt2 * cell, norms), 1.0, 1e-12);
}

TEST(EnergyCost, IndependentOfWeights) {
  const CostDomain domain{20.0, 0.01, 0.2, 2.0};
  const auto a = compute_norms(domain, CostConfig{}, {0.2, 0.3, 0.5});
  const auto b = compute_norms(domain, CostConfig{}, {1, 0, 0});
  EXPECT_EQ(energy_cost(7.0, 0.1, 2.0, a), energy_cost(7.0, 0.1, 2.0, b));
  EXPECT_EQ(risk_cost(7.0, 0.1, 2.0, a), risk_cost(7.0, 0.1, 2.0, b));
}

TEST(CrashRate, ClampsToUnitInterval) {
  EXPECT_EQ(crash_rate_raw(0.0, 0.0, kCrash), 0.0);
  // -0.0288 + 0.319 * 0.3 + 10.8 * 0.09 = 1.0389
  EXPECT_NEAR(kCrash(0.0, 0.3), 1.0389, 1e-12);
  EXPECT_EQ(crash_rate_raw(0.0, 0.3, kCrash), 1.0);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double p = crash_rate_raw(uniform(rng, -90, 90), uniform(rng, 0, 1), kCrash);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(CrashRate, DistanceScaling) {
  EXPECT_NEAR(scale_crash_probability(0.5, 16.0, 8.0), 0.75, 1e-12);
  EXPECT_NEAR(scale_crash_probability(0.137, 8.0, 8.0), 0.137, 1e-15);
  EXPECT_EQ(scale_crash_probability(0.0, 123.0, 8.0), 0.0);
  EXPECT_EQ(scale_crash_probability(1.0, 0.5, 8.0), 1.0);
  double prev = 0.0;
  for (double d = 0.5; d < 50.0; d += 0.5) {
    const double p = scale_crash_probability(0.02, d, 8.0);
    EXPECT_GE(p, prev);
    prev = p;
  }
}

TEST(RiskCost, FlatRockFreeIsZero) {
  const CostDomain domain{20.0, 0.0, 0.2, 1.0};
  const auto norms = compute_norms(domain, CostConfig{}, {0, 1, 0});
  EXPECT_GT(norms.r_star_max, 0.0);
  EXPECT_EQ(risk_cost(0.0, 0.0, 1.0, norms), 0.0);
}

TEST(RiskCost, WorstEdgeIsOne) {
  const CostDomain domain{18.0, 0.0, 0.05, 3.0};
  const auto norms = compute_norms(domain, CostConfig{}, {0, 1, 0});
  // crash surface is convex here, so the maximum sits on a corner
  double worst = 0.0;
  for (double s : {-18.0, 18.0}) {
    for (double r : {0.0, 0.05}) worst = std::max(worst, risk_cost(s, r, sqrt2 * 3.0, norms));
  }
  EXPECT_NEAR(worst, 1.0, 1e-12);
}

TEST(RiskCost, RiskFreeMapGuard) {
  const MapStack s = flat_stack(5, 5, 2.0);
  const auto norms = compute_norms(s, CostConfig{}, {0, 1, 0});
  EXPECT_EQ(norms.r_star_max, 0.0);
  EXPECT_EQ(risk_cost(0.0, 0.0, 2.0, norms), 0.0);
  EXPECT_EQ(edge_cost(s, {2, 2}, {1, 1}, {0, 1, 0}, norms).weighted_total, 0.0);
}

TEST(ScienceAndBanned, Values) {
  EXPECT_EQ(science_cost(1.0), 0.0);
  EXPECT_EQ(science_cost(0.0), 1.0);
  EXPECT_NEAR(science_cost(0.7), 0.3, 1e-15);
  EXPECT_EQ(banned_cost(true), std::numeric_limits<double>::infinity());
  EXPECT_EQ(banned_cost(false), 0.0);
}

TEST(ComputeNorms, FlatRockFreeMap) {
  const double cell = 2.5;
  const MapStack s = flat_stack(6, 6, cell);
  const auto norms = compute_norms(s, CostConfig{}, {1, 0, 0});
  EXPECT_NEAR(norms.e_star_max, 803.0 * sqrt2 * cell / 8.0, 1e-9);
  EXPECT_EQ(norms.e_star_max, norms.e_star_min);
  EXPECT_NEAR(norms.energy_min_edge, energy_cost(0, 0, cell, norms), 1e-15);
  EXPECT_NEAR(norms.energy_min_edge, 1.0 / sqrt2, 1e-12);
  EXPECT_EQ(norms.r_star_max, 0.0);
  EXPECT_NEAR(norms.h_min_per_meter, norms.energy_min_edge / cell, 1e-15);
}

TEST(ComputeNorms, FullyBannedMapIsInfeasible) {
  const MapStack s = make_stack(3, 3, 1.0, [](int, int) { return 0.0; }, [](int, int) { return 0.9; });
  EXPECT_THROW(compute_norms(s, CostConfig{}, {1, 0, 0}), InfeasibleError);
}

TEST(ComputeNorms, Invariants) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MapStack s = testing::corpus_map(seed);
    const auto n = compute_norms(s, CostConfig{}, {0.3, 0.4, 0.3});
    EXPECT_GE(n.e_star_max, n.e_star_min);
    EXPECT_GT(n.e_star_min, 0.0);
    EXPECT_LE(0.0, n.r_star_min);
    EXPECT_LE(n.r_star_min, n.r_star_max);
    EXPECT_LE(n.r_star_max, 1.0);
    EXPECT_GE(n.h_min_per_meter, 0.0);
  }
}

TEST(QuadraticExtrema, MatchesBruteForce) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 40; ++i) {
    PolynomialCoeffs c;
    for (auto& v : c.p) v = uniform(rng, -2, 2);
    const double s_lo = uniform(rng, -3, 0);
    const double s_hi = s_lo + uniform(rng, 0.5, 3);
    const double r_lo = uniform(rng, -1, 0.5);
    const double r_hi = r_lo + uniform(rng, 0.2, 1);
    const auto exact = quadratic_extrema(c, s_lo, s_hi, r_lo, r_hi);
    const auto grid = testing::brute_force_extrema(c, s_lo, s_hi, r_lo, r_hi, 1e-3, 1e-3);
    const double gap = testing::grid_min_gap(c, s_lo, s_hi, r_lo, r_hi, 1e-3, 1e-3);
    // a grid can only miss an extremum, never beat it
    EXPECT_LE(exact.min, grid.min + 1e-12);
    EXPECT_GE(exact.max, grid.max - 1e-12);
    EXPECT_LE(grid.min - exact.min, gap);
    EXPECT_LE(exact.max - grid.max, gap);
  }
}

TEST(QuadraticExtrema, InteriorStationaryPoint) {
  // (s - 1)^2 + (r - 2)^2 + 3 has its minimum strictly inside
  const PolynomialCoeffs c{{1 + 4 + 3, -2, -4, 1, 0, 1}};
  const auto e = quadratic_extrema(c, -5, 5, -5, 5);
  EXPECT_NEAR(e.min, 3.0, 1e-12);
  EXPECT_NEAR(e.max, 36 + 49 + 3, 1e-12);
}

TEST(EdgeCost, CornerWeightsProjectOneComponent) {
  const MapStack s = make_stack(4, 4, 3.0, [](int r, int c) { return 0.4 * r + 0.2 * c * c; },
                                [](int r, int c) { return 0.02 * (r + c); },
                                [](int r, int c) { return 0.1 * (r * 4 + c) / 1.6; });
  const auto norms = compute_norms(s, CostConfig{}, {1, 0, 0});
  for (const auto& d : kDirections) {
    const Cell from{1, 1};
    const Cell to{1 + d.d_row, 1 + d.d_col};
    const auto e = edge_cost(s, from, to, {1, 0, 0}, norms);
    EXPECT_EQ(e.weighted_total, e.energy);
    EXPECT_EQ(edge_cost(s, from, to, {0, 1, 0}, norms).weighted_total, e.risk);
    EXPECT_EQ(edge_cost(s, from, to, {0, 0, 1}, norms).weighted_total, e.science);
    EXPECT_EQ(e.science, science_cost(s.interest(to)));
  }
}

TEST(EdgeCost, FullInterestDestinationCostsNothingForScienceWeight) {
  const MapStack s = make_stack(3, 3, 1.0, [](int, int) { return 0.0; }, {}, [](int, int) { return 1.0; });
  const auto norms = compute_norms(s, CostConfig{}, {0, 0, 1});
  EXPECT_EQ(edge_cost(s, {0, 0}, {1, 1}, {0, 0, 1}, norms).weighted_total, 0.0);
}

TEST(EdgeCost, FlatRockFreeAxisEdgeHasNoRisk) {
  // some rock elsewhere keeps r_star_max positive
  const MapStack s = make_stack(4, 4, 1.0, [](int, int) { return 0.0; },
                                [](int r, int c) { return r == 3 && c == 3 ? 0.2 : 0.0; });
  const auto norms = compute_norms(s, CostConfig{}, {0, 1, 0});
  ASSERT_GT(norms.r_star_max, 0.0);
  EXPECT_EQ(edge_cost(s, {0, 0}, {0, 1}, {0, 1, 0}, norms).weighted_total, 0.0);
}

TEST(EdgeCost, SamplesDestinationCell) {
  const MapStack s = make_stack(3, 3, 1.0, [](int, int) { return 0.0; }, [](int r, int) { return r == 0 ? 0.1 : 0.0; },
                                [](int r, int) { return r == 0 ? 0.9 : 0.2; });
  const auto norms = compute_norms(s, CostConfig{}, {1, 0, 0});
  const auto up = edge_cost(s, {1, 1}, {0, 1}, {1, 0, 0}, norms);
  const auto down = edge_cost(s, {0, 1}, {1, 1}, {1, 0, 0}, norms);
  EXPECT_NEAR(up.science, 0.1, 1e-15);
  EXPECT_NEAR(down.science, 0.8, 1e-15);
  EXPECT_NEAR(up.energy, energy_cost(0, 0.1, 1.0, norms), 1e-15);
}

TEST(EdgeCost, BannedDestinationIsInfinite) {
  const MapStack s = make_stack(3, 3, 1.0, [](int, int) { return 0.0; }, {}, {},
                                [](int r, int c) { return r == 0 && c == 0; });
  const auto norms = compute_norms(s, CostConfig{}, {1, 0, 0});
  EXPECT_TRUE(std::isinf(edge_cost(s, {1, 1}, {0, 0}, {1, 0, 0}, norms).weighted_total));
  EXPECT_THROW(edge_cost(s, {0, 0}, {2, 2}, {1, 0, 0}, norms), RangeError);
}

// Every feasible edge on random maps: components within [0, 1] and the heuristic rate is a lower bound.
TEST(EdgeCost, ComponentBoundsAndHeuristicLowerBound) {
  std::mt19937_64 rng(17);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const MapStack s = testing::corpus_map(seed + 100);
    const auto& g = s.geometry();
    const CostWeights w = testing::random_weights(rng);
    const auto norms = compute_norms(s, CostConfig{}, w);
    for (int r = 0; r < g.n_rows; ++r) {
      for (int c = 0; c < g.n_cols; ++c) {
        if (s.banned({r, c})) continue;
        for (const auto& d : kDirections) {
          const Cell to{r + d.d_row, c + d.d_col};
          if (!g.contains(to) || s.banned(to)) continue;
          const auto e = edge_cost(s, {r, c}, to, w, norms);
          ASSERT_GT(e.energy, 0.0);
          ASSERT_LE(e.energy, 1.0 + 1e-12);
          ASSERT_GE(e.risk, 0.0);
          ASSERT_LE(e.risk, 1.0 + 1e-12);
          ASSERT_LE(norms.h_min_per_meter * e.length_m, e.weighted_total + 1e-12);
        }
      }
    }
  }
}

TEST(CostConfigFile, ParseEchoRoundTrip) {
  std::istringstream in(
      "# robot\nenergy_coeffs = 1,2,3,4,5,6\nd_sim = 4\nvelocity = 0.5\nmax_slope = 25\nmax_rock = 0.2\n");
  const CostConfig c = parse_cost_config(KeyValueFile::parse(in));
  EXPECT_EQ(c.energy.p[5], 6.0);
  EXPECT_EQ(c.crash.p, PolynomialCoeffs::crash_rate().p);
  EXPECT_EQ(c.d_sim, 4.0);
  EXPECT_EQ(c.thresholds().max_slope_deg, 25.0);
  std::istringstream echoed(echo_cost_config(c));
  const CostConfig back = parse_cost_config(KeyValueFile::parse(echoed));
  EXPECT_EQ(back.energy.p, c.energy.p);
  EXPECT_EQ(back.crash.p, c.crash.p);
  EXPECT_EQ(back.velocity, c.velocity);
  EXPECT_EQ(back.max_rock, c.max_rock);
}

TEST(CostConfigFile, Rejects) {
  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_cost_config(KeyValueFile::parse(in));
  };
  EXPECT_THROW(parse("energy_coeffs = 1,2,3\n"), ConfigError);
  EXPECT_THROW(parse("d_sim = 0\n"), ConfigError);
  EXPECT_THROW(parse("speed = 1\n"), ConfigError);
  EXPECT_THROW(parse("max_rock = 1.5\n"), ConfigError);
}

TEST(CostWeights, Validation) {
  EXPECT_NO_THROW(CostWeights::checked(0.2, 0.3, 0.5));
  EXPECT_NO_THROW(CostWeights::checked(1.0 / 3, 1.0 / 3, 1.0 / 3));
  EXPECT_THROW(CostWeights::checked(0.5, 0.5, 0.5), ConfigError);
  EXPECT_THROW(CostWeights::checked(-0.1, 0.6, 0.5), ConfigError);
  EXPECT_THROW(CostWeights::checked(0.2, 0.3, 0.5 + 1e-9), ConfigError);
}

}  // namespace
}  // namespace moplan
