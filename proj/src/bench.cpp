#include "moplan/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <set>

#include <fmt/format.h>

#include "moplan/errors.hpp"
#include "moplan/planner.hpp"
#include "moplan/random.hpp"
#include "moplan/synth.hpp"

namespace moplan {

namespace {

using Clock = std::chrono::steady_clock;

const std::vector<CostWeights>& bench_weights() {
  static const std::vector<CostWeights> w{
      {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, {0.5, 0.0, 0.5},
      {0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.8, 0.1, 0.1},
  };
  return w;
}

Cell random_free_cell(const MapStack& stack, std::mt19937_64& rng) {
  const auto& g = stack.geometry();
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const Cell c{static_cast<int>(uniform_index(rng, g.n_rows)), static_cast<int>(uniform_index(rng, g.n_cols))};
    if (!stack.banned(c)) return c;
  }
  throw InfeasibleError("benchmark map has no free cell");
}

}  // namespace

LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw RangeError("fit_linear: x and y differ in length");
  if (std::set<double>(x.begin(), x.end()).size() < 2) {
    throw RangeError("linear fit needs at least two distinct sizes");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

BenchReport run_bench(const BenchOptions& options, const CostConfig& config) {
  if (std::set<int>(options.sizes.begin(), options.sizes.end()).size() < 2) {
    throw RangeError("benchmark needs at least two distinct map sizes to fit a line");
  }
  if (options.endpoint_pairs == 0 || options.weight_triples == 0) throw ConfigError("benchmark needs trials > 0");

  BenchReport report;
  std::vector<double> xs, ys;
  for (int size : options.sizes) {
    SynthParams params;
    params.rows = params.cols = size;
    params.cell_size = options.cell_size;
    params.seed = options.seed + static_cast<std::uint64_t>(size);
    params.roughness = 0.5;
    params.rock_density = 0.5;
    params.hotspots = 4;
    const auto maps = synthesize(params);

    const auto t0 = Clock::now();
    const MapStack stack = assemble_synth(maps, config.thresholds());
    const CostDomain domain = feasible_domain(stack);
    std::vector<NormalizationConstants> norms;
    const auto& weights = bench_weights();
    for (std::size_t w = 0; w < options.weight_triples; ++w) {
      norms.push_back(compute_norms(domain, config, weights[w % weights.size()]));
    }
    BenchSizeResult res;
    res.size = size;
    res.n_pixel = stack.geometry().cell_count();
    res.init_seconds = std::chrono::duration<double>(Clock::now() - t0).count();

    std::mt19937_64 rng(options.seed * 7919 + static_cast<std::uint64_t>(size));
    double search = 0.0;
    double expanded = 0.0;
    std::size_t pairs = 0;
    for (int attempt = 0; pairs < options.endpoint_pairs && attempt < 1000; ++attempt) {
      const Cell a = random_free_cell(stack, rng);
      const Cell b = random_free_cell(stack, rng);
      if (std::max(std::abs(a.row - b.row), std::abs(a.col - b.col)) < size / 2) continue;
      std::vector<double> times;
      std::vector<std::size_t> counts;
      try {
        for (std::size_t w = 0; w < options.weight_triples; ++w) {
          const auto tp = Clock::now();
          const auto result =
              plan_with_stats(stack, {a, b, weights[w % weights.size()], HeuristicMode::admissible}, norms[w]);
          times.push_back(std::chrono::duration<double>(Clock::now() - tp).count());
          counts.push_back(result.stats.expanded);
        }
      } catch (const InfeasibleError&) {
        continue;  // disconnected pair; draw another
      }
      for (double t : times) search += t;
      for (auto c : counts) expanded += static_cast<double>(c);
      ++pairs;
    }
    if (pairs == 0) throw InfeasibleError(fmt::format("no connected endpoint pair on the {}x{} benchmark map", size, size));
    res.plans = pairs * options.weight_triples;
    res.mean_search_seconds = search / static_cast<double>(res.plans);
    res.mean_expanded = expanded / static_cast<double>(res.plans);
    res.mean_total_seconds = res.init_seconds + res.mean_search_seconds;
    xs.push_back(static_cast<double>(res.n_pixel));
    ys.push_back(res.mean_total_seconds);
    report.sizes.push_back(res);
  }
  report.fit = fit_linear(xs, ys);
  report.pass = report.fit.r_squared >= options.min_r_squared;
  return report;
}

nlohmann::json bench_json(const BenchReport& report) {
  nlohmann::json sizes = nlohmann::json::array();
  for (const auto& s : report.sizes) {
    sizes.push_back({{"size", s.size},
                     {"n_pixel", s.n_pixel},
                     {"init_seconds", s.init_seconds},
                     {"mean_search_seconds", s.mean_search_seconds},
                     {"mean_total_seconds", s.mean_total_seconds},
                     {"mean_expanded", s.mean_expanded},
                     {"plans", s.plans}});
  }
  return {{"sizes", sizes},
          {"fit",
           {{"ms_per_pixel", report.fit.slope * 1e3},
            {"intercept_ms", report.fit.intercept * 1e3},
            {"r_squared", report.fit.r_squared}}},
          {"pass", report.pass}};
}

}  // namespace moplan
