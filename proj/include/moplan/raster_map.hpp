#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace moplan {

enum class LayerKind : int {
  elevation = 0,
  rock_abundance = 1,
  scientific_interest = 2,
  banned = 3,
};

inline constexpr std::size_t kLayerKindCount = 4;

std::string_view to_string(LayerKind kind);
/// Accepts "elevation"/"dem", "rock"/"rock_abundance", "science"/"scientific_interest", "banned".
LayerKind parse_layer_kind(std::string_view name);

/// Grid cell; row 0 is the northernmost row.
struct Cell {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Eight-connected move, listed in expansion order N, NE, E, SE, S, SW, W, NW.
struct Direction {
  int d_row;
  int d_col;
  std::string_view name;
};

inline constexpr std::array<Direction, 8> kDirections{{
    {-1, 0, "N"},
    {-1, 1, "NE"},
    {0, 1, "E"},
    {1, 1, "SE"},
    {1, 0, "S"},
    {1, -1, "SW"},
    {0, -1, "W"},
    {-1, -1, "NW"},
}};

/// Index into kDirections of the move from -> to, or nullopt if the cells are not 8-neighbors.
std::optional<std::size_t> direction_index(Cell from, Cell to);
bool are_neighbors(Cell a, Cell b);

struct GridGeometry {
  int n_rows = 0;
  int n_cols = 0;
  double cell_size = 1.0;  // meters per pixel
  double x_ll = 0.0;       // world x of the lower-left cell corner
  double y_ll = 0.0;       // world y of the lower-left cell corner
  double nodata = -9999.0;

  /// Throws GeometryError unless n_rows, n_cols >= 2 and cell_size > 0.
  void validate() const;

  std::size_t cell_count() const {
    return static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols);
  }
  bool contains(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < n_rows && c.col < n_cols; }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(n_cols) + static_cast<std::size_t>(c.col);
  }
  Cell cell(std::size_t index) const {
    return {static_cast<int>(index / static_cast<std::size_t>(n_cols)),
            static_cast<int>(index % static_cast<std::size_t>(n_cols))};
  }

  /// Planar distance between two cell centers in meters.
  double distance(Cell a, Cell b) const;
  std::pair<double, double> center(Cell c) const;
  /// Cell containing world point (x, y); nullopt outside the grid.
  std::optional<Cell> cell_at(double x, double y) const;

  /// Same shape, cell size and origin (nodata sentinels may differ).
  bool same_grid(const GridGeometry& other) const;
};

struct MapLayer {
  LayerKind kind = LayerKind::elevation;
  GridGeometry geometry;
  std::vector<double> values;         // row-major, 0 where missing
  std::vector<std::uint8_t> missing;  // 1 where the file held the nodata sentinel

  double at(Cell c) const { return values[geometry.index(c)]; }
  bool is_missing(Cell c) const { return missing[geometry.index(c)] != 0; }

  static MapLayer filled(LayerKind kind, const GridGeometry& geometry, double value);
};

struct LayerStats {
  double min = 0.0;
  double max = 0.0;
  std::size_t valid_cells = 0;
};

struct BanThresholds {
  double max_slope_deg = 30.0;
  double max_rock = 0.3;
};

/// Aligned elevation, rock, science and banned layers. Immutable once assembled.
class MapStack {
 public:
  const GridGeometry& geometry() const { return geometry_; }
  const MapLayer& layer(LayerKind kind) const { return layers_[static_cast<std::size_t>(kind)]; }
  const LayerStats& stats(LayerKind kind) const { return stats_[static_cast<std::size_t>(kind)]; }
  const BanThresholds& thresholds() const { return thresholds_; }

  double elevation(Cell c) const { return layer(LayerKind::elevation).at(c); }
  double rock(Cell c) const { return layer(LayerKind::rock_abundance).at(c); }
  double interest(Cell c) const { return layer(LayerKind::scientific_interest).at(c); }

  /// Effective ban: user mask, unknown terrain, and slope/rock thresholds combined.
  bool banned(Cell c) const { return banned_[geometry_.index(c)] != 0; }
  std::span<const std::uint8_t> banned_mask() const { return banned_; }

 private:
  friend MapStack assemble_stack(std::vector<MapLayer> layers, const BanThresholds& thresholds);

  GridGeometry geometry_;
  std::array<MapLayer, kLayerKindCount> layers_;
  std::array<LayerStats, kLayerKindCount> stats_;
  std::vector<std::uint8_t> banned_;
  BanThresholds thresholds_;
};

MapLayer parse_layer(std::istream& in, LayerKind kind, std::string_view source_name = "<stream>");
MapLayer load_layer(const std::filesystem::path& path, LayerKind kind);
void write_layer(std::ostream& out, const MapLayer& layer);
void save_layer(const std::filesystem::path& path, const MapLayer& layer);

MapStack assemble_stack(std::vector<MapLayer> layers, const BanThresholds& thresholds = {});

/// Signed inclination in degrees of the line between two neighboring cell centers; positive uphill.
double edge_slope(const MapStack& stack, Cell from, Cell to);

/// Original banned layer OR unknown terrain OR rock > max_rock OR steepest incident slope > max_slope_deg.
MapLayer derive_banned_mask(const MapStack& stack, double max_slope_deg, double max_rock);

/// Canonical text form of every layer and the effective ban mask; equal stacks serialize identically.
std::string serialize(const MapStack& stack);

}  // namespace moplan
