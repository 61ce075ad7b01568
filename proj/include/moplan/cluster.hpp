#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "moplan/sweep.hpp"

namespace moplan {

using CostPoint = std::array<double, 3>;

/// Successful records mapped into the unit cube, per-axis min-max over (sum E, sum R, sum I).
struct CostSpace {
  std::vector<CostPoint> points;
  std::vector<std::size_t> record_positions;  // points[i] comes from db.records[record_positions[i]]
  CostPoint lo{};
  CostPoint hi{};

  CostPoint to_raw(const CostPoint& p) const;
};

/// Throws RangeError when the database has no successful record. Constant axes map to 0.
CostSpace normalize_cost_space(const PathDatabase& db);

struct KMeansOptions {
  std::size_t k = 4;
  std::uint64_t seed = 0;
  std::size_t candidates = 0;  // 0 selects floor(2 + ln k)
  std::size_t max_iterations = 300;
  std::size_t workers = 1;
};

std::size_t default_candidate_count(std::size_t k);

struct ClusterReport {
  std::size_t k = 0;
  std::size_t candidates = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignments;  // point -> cluster
  std::vector<CostPoint> centroids;
  std::vector<double> variances;  // mean squared distance of members to their centroid
  std::vector<std::optional<std::size_t>> representatives;  // point nearest each centroid; empty clusters have none
  std::vector<std::size_t> member_counts;
  std::vector<std::size_t> initial_centers;  // seeding picks, as point indices
  std::vector<double> sse_history;           // seeding assignment, then after every centroid update
  std::size_t iterations = 0;
  bool converged = false;
};

/// Greedy k-means++ seeding (best of `candidates` D^2 draws per center) followed by Lloyd iterations.
/// Throws RangeError on empty input or k outside [1, |points|].
ClusterReport kmeans_pp(std::span<const CostPoint> points, const KMeansOptions& options);

double squared_distance(const CostPoint& a, const CostPoint& b);

struct ClusterSummaryRow {
  std::size_t cluster = 0;
  std::optional<std::size_t> record_idx;  // representative record
  double energy_pct = 0.0;   // representative energy_rel relative to the database maximum
  double risk_pct = 0.0;
  double science_pct = 0.0;
  std::size_t members = 0;
  double variance = 0.0;
};

std::vector<ClusterSummaryRow> cluster_summary(const ClusterReport& report, const PathDatabase& db,
                                               const CostSpace& space);
std::string render_cluster_table(std::span<const ClusterSummaryRow> rows);

struct VarianceProfileRow {
  std::size_t k = 0;
  double mean_variance = 0.0;  // total SSE / point count
  double max_variance = 0.0;   // worst single cluster
};

/// Clusters for every k in [k_min, min(k_max, |points|)] with the same seed.
std::vector<VarianceProfileRow> variance_profile(std::span<const CostPoint> points, std::size_t k_min,
                                                 std::size_t k_max, const KMeansOptions& base);

nlohmann::json cluster_report_json(const ClusterReport& report, const PathDatabase& db, const CostSpace& space);

}  // namespace moplan
