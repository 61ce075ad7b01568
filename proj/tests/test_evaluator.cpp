#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "moplan/errors.hpp"
#include "moplan/evaluator.hpp"
#include "moplan/random.hpp"
#include "support/oracles.hpp"

namespace moplan {
namespace {

using std::numbers::sqrt2;

NormalizationConstants unit_norms(double r_star_max, double e_star_max = 2.0) {
  NormalizationConstants n;
  n.r_star_max = r_star_max;
  n.e_star_max = e_star_max;
  return n;
}

RawPath straight_path(int edges, double risk_cost_per_edge, double energy_cost_per_edge = 0.5) {
  RawPath p;
  for (int i = 0; i <= edges; ++i) {
    p.cells.push_back({0, i});
    p.node_science.push_back(0.5);
  }
  for (int i = 0; i < edges; ++i) {
    EdgeCostBreakdown e;
    e.risk = risk_cost_per_edge;
    e.energy = energy_cost_per_edge;
    e.science = 0.5;
    e.length_m = 8.0;
    p.edges.push_back(e);
  }
  return p;
}

const GridGeometry kGrid{4, 20, 8.0, 0, 0, -9999};

TEST(Evaluate, TwoEdgeRiskComposition) {
  // risk cost 0.2 against r_star_max 0.5 is a crash probability of 0.1 per edge
  const auto m = evaluate(straight_path(2, 0.2), unit_norms(0.5), kGrid);
  EXPECT_NEAR(m.risk_total, 0.19, 1e-15);
  EXPECT_DOUBLE_EQ(m.length_m, 16.0);
}

TEST(Evaluate, EnergyUsesTraversalTime) {
  const auto n = unit_norms(0.5, 3.0);
  const RawPath p = straight_path(3, 0.0, 0.25);
  const auto v = evaluate(p, n, kGrid, TraversalTime::from_velocity);
  EXPECT_NEAR(v.energy_rel, 3 * 0.25 * 3.0 * (8.0 / 0.8), 1e-12);
  RawPath diag = p;
  for (auto& e : diag.edges) e.length_m = 8.0 * sqrt2;
  const auto f = evaluate(diag, n, kGrid, TraversalTime::fixed_sim_grid);
  EXPECT_NEAR(f.energy_rel, 3 * 0.25 * 3.0 * 10.0 * sqrt2, 1e-12);
}

TEST(Evaluate, FullInterestGivesFullScience) {
  RawPath p = straight_path(4, 0.0);
  for (auto& s : p.node_science) s = 0.0;
  EXPECT_EQ(evaluate(p, unit_norms(0.1), kGrid).science_total, 1.0);
}

TEST(Evaluate, SingleCellPath) {
  RawPath p;
  p.cells = {{1, 1}};
  p.node_science = {0.35};
  const auto m = evaluate(p, unit_norms(0.2), kGrid);
  EXPECT_EQ(m.length_m, 0.0);
  EXPECT_EQ(m.risk_total, 0.0);
  EXPECT_EQ(m.energy_rel, 0.0);
  EXPECT_DOUBLE_EQ(m.science_total, 0.65);
}

TEST(Evaluate, ComponentSums) {
  const auto m = evaluate(straight_path(5, 0.1, 0.3), unit_norms(0.5), kGrid);
  EXPECT_NEAR(m.component_costs.energy, 1.5, 1e-12);
  EXPECT_NEAR(m.component_costs.risk, 0.5, 1e-12);
  EXPECT_NEAR(m.component_costs.science, 2.5, 1e-12);
}

TEST(Evaluate, RiskMonotoneInEdges) {
  double prev = 0.0;
  for (int n = 1; n < 40; ++n) {
    const double r = evaluate(straight_path(n, 0.01), unit_norms(0.5), kGrid).risk_total;
    EXPECT_GT(r, prev);
    EXPECT_LE(r, 1.0);
    prev = r;
  }
}

TEST(ComposeRisk, LogDomainMatchesProduct) {
  std::mt19937_64 rng(21);
  std::vector<double> p(10000);
  for (auto& v : p) v = uniform(rng, 0.0, 1e-3);
  double survival = 1.0;
  for (double v : p) survival *= 1.0 - v;
  EXPECT_NEAR(compose_risk(p), 1.0 - survival, 1e-12);
}

TEST(InvertRisk, RoundTrip) {
  std::mt19937_64 rng(31);
  const CostDomain domain{30.0, 0.0, 0.3, 5.0};
  const auto norms = compute_norms(domain, CostConfig{}, {0, 1, 0});
  for (int i = 0; i < 1000; ++i) {
    const double s = uniform(rng, -30, 30);
    const double r = uniform(rng, 0, 0.3);
    const double d = uniform(rng, 1, 12);
    const double raw = crash_rate_raw(s, r, norms.crash);
    EXPECT_NEAR(invert_risk_cost(risk_cost(s, r, d, norms), d, norms), raw, 1e-9);
  }
}

TEST(Evaluate, ScienceIsMeanInterestOnPlannedPath) {
  const MapStack s = testing::corpus_map(14);
  const CostWeights w{0.3, 0.3, 0.4};
  const auto norms = compute_norms(s, CostConfig{}, w);
  std::mt19937_64 rng(2);
  int checked = 0;
  for (int t = 0; t < 20 && checked < 5; ++t) {
    const Cell a = testing::random_free_cell(s, rng);
    const Cell b = testing::random_free_cell(s, rng);
    RawPath p;
    try {
      p = plan(s, {a, b, w, HeuristicMode::admissible}, norms);
    } catch (const InfeasibleError&) {
      continue;
    }
    double mean = 0.0;
    for (const auto& c : p.cells) mean += s.interest(c);
    mean /= static_cast<double>(p.cells.size());
    EXPECT_NEAR(evaluate(p, norms, s.geometry()).science_total, mean, 1e-12);
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(RelativeEnergy, Scaling) {
  std::vector<PathMetrics> m(3);
  m[0].energy_rel = 200.0;
  m[1].energy_rel = 100.0;
  m[2].energy_rel = 300.0;
  const auto pct = relative_energy_scaling(m, 0);
  EXPECT_DOUBLE_EQ(pct[0], 100.0);
  EXPECT_DOUBLE_EQ(pct[1], 50.0);
  EXPECT_DOUBLE_EQ(pct[2], 150.0);
  m[0].energy_rel = 0.0;
  EXPECT_THROW(relative_energy_scaling(m, 0), RangeError);
}

TEST(TimeModel, Names) {
  EXPECT_EQ(parse_time_model("velocity"), TraversalTime::from_velocity);
  EXPECT_EQ(parse_time_model("fixed"), TraversalTime::fixed_sim_grid);
  EXPECT_EQ(parse_time_model(to_string(TraversalTime::fixed_sim_grid)), TraversalTime::fixed_sim_grid);
  EXPECT_THROW(parse_time_model("warp"), ConfigError);
}

}  // namespace
}  // namespace moplan
