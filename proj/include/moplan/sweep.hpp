#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "moplan/cost_model.hpp"
#include "moplan/evaluator.hpp"
#include "moplan/planner.hpp"

namespace moplan {

struct WeightGrid {
  std::size_t step_count = 0;
  double epsilon = 1e-2;
  bool dedupe = false;
  std::size_t corner_count = 0;  // exact (1,0,0), (0,1,0), (0,0,1) appended after the cube
  std::vector<CostWeights> triples;
};

/// step_count^3 triples from a log-spaced axis on [epsilon, 1], each normalized to sum 1,
/// followed by the three exact corners when `append_corners` is set.
WeightGrid build_weight_grid(std::size_t step_count, double epsilon = 1e-2, bool append_corners = true,
                             bool dedupe = false);

enum class RecordStatus { ok, no_path };

std::string_view to_string(RecordStatus status);

struct PathRecord {
  std::size_t idx = 0;
  CostWeights weights;
  RecordStatus status = RecordStatus::ok;
  double cost_total = 0.0;
  PathMetrics metrics;  // component_costs holds the summed E, R, I costs
  std::vector<Cell> cells;
};

struct PathDatabase {
  std::string map_id;
  Cell start;
  Cell goal;
  std::size_t step_count = 0;
  double epsilon = 0.0;
  bool dedupe = false;
  HeuristicMode heuristic_mode = HeuristicMode::admissible;
  TraversalTime time_model = TraversalTime::from_velocity;
  CostConfig config;
  std::vector<PathRecord> records;

  std::size_t success_count() const;
};

struct SweepOptions {
  std::size_t workers = 1;
  HeuristicMode heuristic_mode = HeuristicMode::admissible;
  TraversalTime time_model = TraversalTime::from_velocity;
};

struct SweepTiming {
  double wall_seconds = 0.0;
  double norm_seconds = 0.0;  // domain scan shared by every triple
  double plan_seconds = 0.0;  // summed over records, all workers
  std::size_t workers = 1;
};

/// Content hash (hex FNV-1a) of the serialized stack and cost config.
std::string map_id(const MapStack& stack, const CostConfig& config);

/// One planner run per triple. Records keep grid order whatever the worker count; unreachable goals become
/// RecordStatus::no_path records. Throws InfeasibleError when every triple fails.
PathDatabase run_sweep(const MapStack& stack, const CostConfig& config, Cell start, Cell goal, const WeightGrid& grid,
                       const SweepOptions& options = {}, SweepTiming* timing = nullptr);

/// "row_col:" followed by run-length direction tokens, e.g. "3_4:2E1SE".
std::string encode_path_rle(std::span<const Cell> cells);
std::vector<Cell> decode_path_rle(std::string_view text);

inline constexpr std::string_view kDatabaseCsvHeader =
    "idx,alpha1,alpha2,alpha3,cost_E,cost_R,cost_I,cost_total,length_m,energy_rel,risk_total,science_total,status,"
    "path_rle";

void write_database_csv(std::ostream& out, const PathDatabase& db);
/// Reads records only; metadata lives in the companion JSON.
std::vector<PathRecord> read_database_csv(std::istream& in, std::string_view source = "<stream>");

nlohmann::json database_metadata(const PathDatabase& db);

/// Writes `<stem>.csv` and `<stem>.json`.
void save_database(const std::filesystem::path& stem, const PathDatabase& db);
/// Loads a CSV and, when present next to it, the companion JSON metadata.
PathDatabase load_database(const std::filesystem::path& csv_path);

}  // namespace moplan
