#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "moplan/cost_model.hpp"

namespace moplan {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Throws RangeError with fewer than two distinct x.
LinearFit fit_linear(std::span<const double> x, std::span<const double> y);

struct BenchOptions {
  std::vector<int> sizes{64, 128, 256, 512};
  std::size_t endpoint_pairs = 5;
  std::size_t weight_triples = 5;
  std::uint64_t seed = 0;
  double cell_size = 5.0;
  double min_r_squared = 0.9;
};

struct BenchSizeResult {
  int size = 0;
  std::size_t n_pixel = 0;
  double init_seconds = 0.0;         // map assembly, ban derivation and normalization
  double mean_search_seconds = 0.0;  // per plan
  double mean_total_seconds = 0.0;   // init + mean search
  double mean_expanded = 0.0;
  std::size_t plans = 0;
};

struct BenchReport {
  std::vector<BenchSizeResult> sizes;
  LinearFit fit;  // mean_total_seconds against n_pixel
  bool pass = false;
};

/// Times plans on synthetic square maps of each size; throws RangeError for fewer than two sizes.
BenchReport run_bench(const BenchOptions& options, const CostConfig& config);

nlohmann::json bench_json(const BenchReport& report);

}  // namespace moplan
