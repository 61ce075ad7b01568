#include "moplan/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "moplan/errors.hpp"
#include "moplan/random.hpp"

namespace moplan {

namespace {

template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

// Nearest centroid for every point (ties -> lowest cluster id); returns whether any assignment changed.
bool assign(std::span<const CostPoint> points, const std::vector<CostPoint>& centroids,
            std::vector<std::size_t>& assignments, std::vector<double>& dist2, std::size_t workers) {
  std::vector<std::uint8_t> changed(points.size(), 0);
  parallel_for(points.size(), workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      std::size_t best = 0;
      double best_d = squared_distance(points[i], centroids[0]);
      for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double d = squared_distance(points[i], centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      changed[i] = assignments[i] != best;
      assignments[i] = best;
      dist2[i] = best_d;
    }
  });
  return std::any_of(changed.begin(), changed.end(), [](std::uint8_t v) { return v != 0; });
}

double sse_of(std::span<const CostPoint> points, const std::vector<CostPoint>& centroids,
              const std::vector<std::size_t>& assignments) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) total += squared_distance(points[i], centroids[assignments[i]]);
  return total;
}

void update_centroids(std::span<const CostPoint> points, const std::vector<std::size_t>& assignments,
                      std::vector<CostPoint>& centroids) {
  std::vector<CostPoint> sums(centroids.size(), CostPoint{0.0, 0.0, 0.0});
  std::vector<std::size_t> counts(centroids.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& s = sums[assignments[i]];
    for (std::size_t d = 0; d < 3; ++d) s[d] += points[i][d];
    ++counts[assignments[i]];
  }
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (counts[c] == 0) continue;  // empty cluster keeps its previous centroid
    for (std::size_t d = 0; d < 3; ++d) centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
  }
}

std::vector<std::size_t> seed_centers(std::span<const CostPoint> points, std::size_t k, std::size_t candidates,
                                      std::mt19937_64& engine) {
  const std::size_t n = points.size();
  std::vector<std::size_t> centers;
  centers.reserve(k);
  centers.push_back(std::min(n - 1, static_cast<std::size_t>(uniform01(engine) * static_cast<double>(n))));

  std::vector<double> mind(n);
  for (std::size_t i = 0; i < n; ++i) mind[i] = squared_distance(points[i], points[centers[0]]);
  std::vector<double> cumulative(n);

  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += mind[i];
      cumulative[i] = total;
    }
    std::size_t chosen = n;
    if (total <= 0.0) {
      // only duplicates of existing centers remain
      for (std::size_t i = 0; i < n && chosen == n; ++i) {
        if (std::find(centers.begin(), centers.end(), i) == centers.end()) chosen = i;
      }
    } else {
      double best_potential = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < candidates; ++t) {
        const double target = uniform01(engine) * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
        std::size_t cand = static_cast<std::size_t>(it - cumulative.begin());
        if (it == cumulative.end()) {
          // target rounded up to the total: take the last point with positive weight
          cand = n - 1;
          while (mind[cand] <= 0.0) --cand;
        }
        double potential = 0.0;
        for (std::size_t i = 0; i < n; ++i) potential += std::min(mind[i], squared_distance(points[i], points[cand]));
        if (potential < best_potential) {
          best_potential = potential;
          chosen = cand;
        }
      }
    }
    centers.push_back(chosen);
    for (std::size_t i = 0; i < n; ++i) mind[i] = std::min(mind[i], squared_distance(points[i], points[chosen]));
  }
  return centers;
}

}  // namespace

double squared_distance(const CostPoint& a, const CostPoint& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

CostPoint CostSpace::to_raw(const CostPoint& p) const {
  CostPoint out;
  for (std::size_t d = 0; d < 3; ++d) out[d] = lo[d] + p[d] * (hi[d] - lo[d]);
  return out;
}

CostSpace normalize_cost_space(const PathDatabase& db) {
  CostSpace space;
  for (std::size_t i = 0; i < db.records.size(); ++i) {
    const auto& r = db.records[i];
    if (r.status != RecordStatus::ok) continue;
    const auto& c = r.metrics.component_costs;
    space.points.push_back({c.energy, c.risk, c.science});
    space.record_positions.push_back(i);
  }
  if (space.points.empty()) throw RangeError("database has no successful records to cluster");
  space.lo = space.hi = space.points.front();
  for (const auto& p : space.points) {
    for (std::size_t d = 0; d < 3; ++d) {
      space.lo[d] = std::min(space.lo[d], p[d]);
      space.hi[d] = std::max(space.hi[d], p[d]);
    }
  }
  for (auto& p : space.points) {
    for (std::size_t d = 0; d < 3; ++d) {
      const double span = space.hi[d] - space.lo[d];
      p[d] = span > 0.0 ? std::clamp((p[d] - space.lo[d]) / span, 0.0, 1.0) : 0.0;
    }
  }
  return space;
}

std::size_t default_candidate_count(std::size_t k) {
  return static_cast<std::size_t>(std::floor(2.0 + std::log(static_cast<double>(std::max<std::size_t>(k, 1)))));
}

ClusterReport kmeans_pp(std::span<const CostPoint> points, const KMeansOptions& options) {
  if (points.empty()) throw RangeError("cannot cluster an empty point set");
  if (options.k < 1 || options.k > points.size()) {
    throw RangeError(fmt::format("k = {} must be in [1, {}]", options.k, points.size()));
  }
  const std::size_t n = points.size();
  ClusterReport report;
  report.k = options.k;
  report.seed = options.seed;
  report.candidates = options.candidates == 0 ? default_candidate_count(options.k) : options.candidates;

  std::mt19937_64 engine(options.seed);
  report.initial_centers = seed_centers(points, options.k, report.candidates, engine);
  report.centroids.reserve(options.k);
  for (std::size_t c : report.initial_centers) report.centroids.push_back(points[c]);

  report.assignments.assign(n, 0);
  std::vector<double> dist2(n, 0.0);
  assign(points, report.centroids, report.assignments, dist2, options.workers);
  report.sse_history.push_back(sse_of(points, report.centroids, report.assignments));

  while (report.iterations < options.max_iterations) {
    ++report.iterations;
    update_centroids(points, report.assignments, report.centroids);
    report.sse_history.push_back(sse_of(points, report.centroids, report.assignments));
    if (!assign(points, report.centroids, report.assignments, dist2, options.workers)) {
      report.converged = true;
      break;
    }
  }
  if (!report.converged) {
    update_centroids(points, report.assignments, report.centroids);
    report.sse_history.push_back(sse_of(points, report.centroids, report.assignments));
  }

  report.member_counts.assign(options.k, 0);
  report.variances.assign(options.k, 0.0);
  report.representatives.assign(options.k, std::nullopt);
  std::vector<double> best(options.k, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = report.assignments[i];
    const double d = squared_distance(points[i], report.centroids[c]);
    ++report.member_counts[c];
    report.variances[c] += d;
    if (d < best[c]) {
      best[c] = d;
      report.representatives[c] = i;
    }
  }
  for (std::size_t c = 0; c < options.k; ++c) {
    if (report.member_counts[c] > 0) report.variances[c] /= static_cast<double>(report.member_counts[c]);
  }
  return report;
}

std::vector<ClusterSummaryRow> cluster_summary(const ClusterReport& report, const PathDatabase& db,
                                               const CostSpace& space) {
  double max_energy = 0.0;
  for (const auto& r : db.records) {
    if (r.status == RecordStatus::ok) max_energy = std::max(max_energy, r.metrics.energy_rel);
  }
  std::vector<ClusterSummaryRow> rows;
  rows.reserve(report.k);
  for (std::size_t c = 0; c < report.k; ++c) {
    ClusterSummaryRow row;
    row.cluster = c;
    row.members = report.member_counts[c];
    row.variance = report.variances[c];
    if (const auto rep = report.representatives[c]) {
      const auto& rec = db.records[space.record_positions[*rep]];
      row.record_idx = rec.idx;
      row.energy_pct = max_energy > 0.0 ? rec.metrics.energy_rel / max_energy * 100.0 : 0.0;
      row.risk_pct = rec.metrics.risk_total * 100.0;
      row.science_pct = rec.metrics.science_total * 100.0;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string render_cluster_table(std::span<const ClusterSummaryRow> rows) {
  std::string out = fmt::format("{:>4} | {:>8} | {:>9} {:>9} {:>11} | {:>9} {:>10}\n", "Path", "Record", "Energy[%]",
                                "Risk[%]", "Science[%]", "No. paths", "Variance");
  for (const auto& r : rows) {
    if (r.record_idx) {
      out += fmt::format("{:>4} | {:>8} | {:>9.2f} {:>9.2f} {:>11.2f} | {:>9} {:>10.4f}\n", r.cluster + 1,
                         *r.record_idx, r.energy_pct, r.risk_pct, r.science_pct, r.members, r.variance);
    } else {
      out += fmt::format("{:>4} | {:>8} | {:>9} {:>9} {:>11} | {:>9} {:>10.4f}\n", r.cluster + 1, "-", "-", "-", "-",
                         r.members, r.variance);
    }
  }
  return out;
}

std::vector<VarianceProfileRow> variance_profile(std::span<const CostPoint> points, std::size_t k_min,
                                                 std::size_t k_max, const KMeansOptions& base) {
  std::vector<VarianceProfileRow> rows;
  for (std::size_t k = std::max<std::size_t>(k_min, 1); k <= std::min(k_max, points.size()); ++k) {
    auto opts = base;
    opts.k = k;
    opts.candidates = 0;
    const auto report = kmeans_pp(points, opts);
    VarianceProfileRow row;
    row.k = k;
    row.mean_variance = report.sse_history.back() / static_cast<double>(points.size());
    row.max_variance = *std::max_element(report.variances.begin(), report.variances.end());
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json cluster_report_json(const ClusterReport& report, const PathDatabase& db, const CostSpace& space) {
  nlohmann::json assignments = nlohmann::json::array();
  for (std::size_t i = 0; i < report.assignments.size(); ++i) {
    assignments.push_back({db.records[space.record_positions[i]].idx, report.assignments[i]});
  }
  nlohmann::json centroids = nlohmann::json::array();
  nlohmann::json centroids_raw = nlohmann::json::array();
  for (const auto& c : report.centroids) {
    centroids.push_back(c);
    centroids_raw.push_back(space.to_raw(c));
  }
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& r : report.representatives) {
    if (r) {
      reps.push_back(db.records[space.record_positions[*r]].idx);
    } else {
      reps.push_back(nullptr);
    }
  }
  nlohmann::json initial = nlohmann::json::array();
  for (std::size_t c : report.initial_centers) initial.push_back(db.records[space.record_positions[c]].idx);
  return {
      {"map_id", db.map_id},
      {"k", report.k},
      {"seed", report.seed},
      {"candidates", report.candidates},
      {"iterations", report.iterations},
      {"converged", report.converged},
      {"cost_space", {{"normalization", "per-axis min-max"}, {"lo", space.lo}, {"hi", space.hi}}},
      {"assignments", assignments},
      {"centroids", centroids},
      {"centroids_raw", centroids_raw},
      {"variances", report.variances},
      {"member_counts", report.member_counts},
      {"representatives", reps},
      {"initial_centers", initial},
      {"sse_history", report.sse_history},
  };
}

}  // namespace moplan
