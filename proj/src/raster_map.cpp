#include "moplan/raster_map.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "moplan/errors.hpp"

namespace moplan {

namespace {

constexpr double kRockTolerance = 1e-6;
constexpr double kScienceTolerance = 1e-6;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

bool parse_double(std::string_view token, double& value) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc{} && ptr == last;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); });
}

double slope_deg(double dh, double distance) {
  return std::atan2(dh, distance) * 180.0 / std::numbers::pi;
}

void validate_values(MapLayer& layer, std::string_view source) {
  auto& values = layer.values;
  const auto& missing = layer.missing;
  switch (layer.kind) {
    case LayerKind::elevation:
      break;
    case LayerKind::rock_abundance:
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (missing[i]) continue;
        const double v = values[i];
        if (!(v >= -kRockTolerance && v <= 1.0 + kRockTolerance)) {
          throw RangeError(fmt::format("{}: rock abundance {} at cell {} outside [0, 1]", source, v, i));
        }
        values[i] = std::clamp(v, 0.0, 1.0);
      }
      break;
    case LayerKind::scientific_interest: {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (missing[i]) continue;
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
      }
      if (lo > hi) break;
      if (lo < -kScienceTolerance || hi > 1.0 + kScienceTolerance) {
        std::clog << fmt::format("warning: {}: scientific interest spans [{}, {}], min-max normalizing\n", source, lo, hi);
        const double span = hi - lo;
        for (std::size_t i = 0; i < values.size(); ++i) {
          if (missing[i]) continue;
          values[i] = span > 0.0 ? (values[i] - lo) / span : 0.0;
        }
      } else {
        for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::clamp(values[i], 0.0, 1.0);
      }
      break;
    }
    case LayerKind::banned:
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (missing[i]) continue;
        if (values[i] != 0.0 && values[i] != 1.0) {
          throw RangeError(fmt::format("{}: banned value {} at cell {} is not 0 or 1", source, values[i], i));
        }
      }
      break;
  }
}

std::vector<std::uint8_t> compute_ban(const std::array<MapLayer, kLayerKindCount>& layers, double max_slope_deg,
                                      double max_rock) {
  const auto& elev = layers[static_cast<std::size_t>(LayerKind::elevation)];
  const auto& rock = layers[static_cast<std::size_t>(LayerKind::rock_abundance)];
  const auto& user = layers[static_cast<std::size_t>(LayerKind::banned)];
  const auto& g = elev.geometry;

  std::vector<std::uint8_t> banned(g.cell_count(), 0);
  for (int r = 0; r < g.n_rows; ++r) {
    for (int c = 0; c < g.n_cols; ++c) {
      const Cell cell{r, c};
      const std::size_t i = g.index(cell);
      if (user.missing[i] || user.values[i] != 0.0 || elev.missing[i] || rock.missing[i] || rock.values[i] > max_rock) {
        banned[i] = 1;
        continue;
      }
      double steepest = 0.0;
      for (const auto& dir : kDirections) {
        const Cell other{r + dir.d_row, c + dir.d_col};
        if (!g.contains(other) || elev.is_missing(other)) continue;
        const double s = std::abs(slope_deg(elev.at(other) - elev.values[i], g.distance(cell, other)));
        steepest = std::max(steepest, s);
      }
      if (steepest > max_slope_deg) banned[i] = 1;
    }
  }
  return banned;
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::elevation:
      return "elevation";
    case LayerKind::rock_abundance:
      return "rock_abundance";
    case LayerKind::scientific_interest:
      return "scientific_interest";
    case LayerKind::banned:
      return "banned";
  }
  return "unknown";
}

LayerKind parse_layer_kind(std::string_view name) {
  const auto n = lower(name);
  if (n == "elevation" || n == "dem") return LayerKind::elevation;
  if (n == "rock" || n == "rock_abundance") return LayerKind::rock_abundance;
  if (n == "science" || n == "scientific_interest" || n == "interest") return LayerKind::scientific_interest;
  if (n == "banned") return LayerKind::banned;
  throw ConfigError(fmt::format("unknown layer kind '{}'", name));
}

std::optional<std::size_t> direction_index(Cell from, Cell to) {
  const int dr = to.row - from.row;
  const int dc = to.col - from.col;
  for (std::size_t i = 0; i < kDirections.size(); ++i) {
    if (kDirections[i].d_row == dr && kDirections[i].d_col == dc) return i;
  }
  return std::nullopt;
}

bool are_neighbors(Cell a, Cell b) { return direction_index(a, b).has_value(); }

void GridGeometry::validate() const {
  if (n_rows < 2 || n_cols < 2) {
    throw GeometryError(fmt::format("grid must be at least 2x2, got {}x{}", n_rows, n_cols));
  }
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw GeometryError(fmt::format("cell size must be positive, got {}", cell_size));
  }
}

double GridGeometry::distance(Cell a, Cell b) const {
  const double dr = a.row - b.row;
  const double dc = a.col - b.col;
  if (dr == 0.0) return std::abs(dc) * cell_size;
  if (dc == 0.0) return std::abs(dr) * cell_size;
  if (std::abs(dr) == 1.0 && std::abs(dc) == 1.0) return std::numbers::sqrt2 * cell_size;
  return std::hypot(dr, dc) * cell_size;
}

std::pair<double, double> GridGeometry::center(Cell c) const {
  return {x_ll + (c.col + 0.5) * cell_size, y_ll + (n_rows - c.row - 0.5) * cell_size};
}

std::optional<Cell> GridGeometry::cell_at(double x, double y) const {
  const double col = std::floor((x - x_ll) / cell_size);
  const double row_from_bottom = std::floor((y - y_ll) / cell_size);
  const Cell c{n_rows - 1 - static_cast<int>(row_from_bottom), static_cast<int>(col)};
  if (!std::isfinite(col) || !std::isfinite(row_from_bottom) || !contains(c)) return std::nullopt;
  return c;
}

bool GridGeometry::same_grid(const GridGeometry& other) const {
  return n_rows == other.n_rows && n_cols == other.n_cols && cell_size == other.cell_size && x_ll == other.x_ll &&
         y_ll == other.y_ll;
}

MapLayer MapLayer::filled(LayerKind kind, const GridGeometry& geometry, double value) {
  MapLayer layer;
  layer.kind = kind;
  layer.geometry = geometry;
  layer.values.assign(geometry.cell_count(), value);
  layer.missing.assign(geometry.cell_count(), 0);
  return layer;
}

MapLayer parse_layer(std::istream& in, LayerKind kind, std::string_view source) {
  GridGeometry g;
  std::array<bool, 6> seen{};
  static constexpr std::array<std::string_view, 6> keys{"ncols", "nrows", "xllcorner", "yllcorner", "cellsize",
                                                        "nodata_value"};
  std::string line;
  std::size_t line_no = 0;
  std::size_t header_lines = 0;
  while (header_lines < keys.size()) {
    if (!std::getline(in, line)) {
      throw ParseError(fmt::format("{}: truncated header after {} lines", source, header_lines));
    }
    ++line_no;
    if (is_blank(line)) continue;
    const auto tokens = split_ws(line);
    if (tokens.size() != 2) throw ParseError(fmt::format("{}:{}: malformed header line '{}'", source, line_no, line));
    const auto key = lower(tokens[0]);
    const auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) throw ParseError(fmt::format("{}:{}: unknown header key '{}'", source, line_no, tokens[0]));
    const auto k = static_cast<std::size_t>(it - keys.begin());
    if (seen[k]) throw ParseError(fmt::format("{}:{}: duplicate header key '{}'", source, line_no, tokens[0]));
    seen[k] = true;
    double v = 0.0;
    if (!parse_double(tokens[1], v)) {
      throw ParseError(fmt::format("{}:{}: bad header value '{}'", source, line_no, tokens[1]));
    }
    switch (k) {
      case 0:
      case 1:
        if (v != std::floor(v) || v < 0 || v > 1e8) {
          throw ParseError(fmt::format("{}:{}: '{}' must be a non-negative integer", source, line_no, tokens[0]));
        }
        (k == 0 ? g.n_cols : g.n_rows) = static_cast<int>(v);
        break;
      case 2:
        g.x_ll = v;
        break;
      case 3:
        g.y_ll = v;
        break;
      case 4:
        g.cell_size = v;
        break;
      default:
        g.nodata = v;
        break;
    }
    ++header_lines;
  }
  try {
    g.validate();
  } catch (const GeometryError& e) {
    throw ParseError(fmt::format("{}: {}", source, e.what()));
  }

  MapLayer layer;
  layer.kind = kind;
  layer.geometry = g;
  layer.values.reserve(g.cell_count());
  layer.missing.reserve(g.cell_count());
  int row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    if (row >= g.n_rows) throw ParseError(fmt::format("{}:{}: more than nrows={} data rows", source, line_no, g.n_rows));
    const auto tokens = split_ws(line);
    if (tokens.size() != static_cast<std::size_t>(g.n_cols)) {
      throw ParseError(fmt::format("{}:{}: row {} has {} values, expected ncols={}", source, line_no, row,
                                   tokens.size(), g.n_cols));
    }
    for (auto token : tokens) {
      double v = 0.0;
      if (!parse_double(token, v) || std::isnan(v)) {
        throw ParseError(fmt::format("{}:{}: bad value '{}'", source, line_no, token));
      }
      const bool is_nodata = v == g.nodata;
      layer.values.push_back(is_nodata ? 0.0 : v);
      layer.missing.push_back(is_nodata ? 1 : 0);
    }
    ++row;
  }
  if (row != g.n_rows) {
    throw ParseError(fmt::format("{}: found {} data rows, expected nrows={}", source, row, g.n_rows));
  }
  validate_values(layer, source);
  return layer;
}

MapLayer load_layer(const std::filesystem::path& path, LayerKind kind) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open map layer '{}'", path.string()));
  return parse_layer(in, kind, path.string());
}

void write_layer(std::ostream& out, const MapLayer& layer) {
  const auto& g = layer.geometry;
  out << fmt::format("ncols {}\nnrows {}\nxllcorner {}\nyllcorner {}\ncellsize {}\nnodata_value {}\n", g.n_cols,
                     g.n_rows, g.x_ll, g.y_ll, g.cell_size, g.nodata);
  std::string row;
  for (int r = 0; r < g.n_rows; ++r) {
    row.clear();
    for (int c = 0; c < g.n_cols; ++c) {
      const Cell cell{r, c};
      if (c > 0) row.push_back(' ');
      row += fmt::format("{}", layer.is_missing(cell) ? g.nodata : layer.at(cell));
    }
    row.push_back('\n');
    out << row;
  }
}

void save_layer(const std::filesystem::path& path, const MapLayer& layer) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write map layer '{}'", path.string()));
  write_layer(out, layer);
  if (!out) throw IoError(fmt::format("failed writing map layer '{}'", path.string()));
}

MapStack assemble_stack(std::vector<MapLayer> layers, const BanThresholds& thresholds) {
  std::array<std::optional<MapLayer>, kLayerKindCount> slots;
  for (auto& layer : layers) {
    auto& slot = slots[static_cast<std::size_t>(layer.kind)];
    if (slot) throw GeometryError(fmt::format("duplicate {} layer", to_string(layer.kind)));
    slot = std::move(layer);
  }
  if (!slots[0]) throw ConfigError("an elevation layer is required");

  const GridGeometry geometry = slots[0]->geometry;
  geometry.validate();
  for (const auto& slot : slots) {
    if (!slot) continue;
    if (!slot->geometry.same_grid(geometry)) {
      const auto& o = slot->geometry;
      throw GeometryError(fmt::format("{} layer is {}x{} @ {} m, elevation is {}x{} @ {} m", to_string(slot->kind),
                                      o.n_rows, o.n_cols, o.cell_size, geometry.n_rows, geometry.n_cols,
                                      geometry.cell_size));
    }
    if (slot->values.size() != geometry.cell_count() || slot->missing.size() != geometry.cell_count()) {
      throw GeometryError(fmt::format("{} layer has inconsistent value count", to_string(slot->kind)));
    }
  }

  MapStack stack;
  stack.geometry_ = geometry;
  stack.thresholds_ = thresholds;
  for (std::size_t k = 0; k < kLayerKindCount; ++k) {
    stack.layers_[k] = slots[k] ? std::move(*slots[k]) : MapLayer::filled(static_cast<LayerKind>(k), geometry, 0.0);
    const auto& layer = stack.layers_[k];
    LayerStats st{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i < layer.values.size(); ++i) {
      if (layer.missing[i]) continue;
      st.min = std::min(st.min, layer.values[i]);
      st.max = std::max(st.max, layer.values[i]);
      ++st.valid_cells;
    }
    if (st.valid_cells == 0) st.min = st.max = 0.0;
    stack.stats_[k] = st;
  }
  stack.banned_ = compute_ban(stack.layers_, thresholds.max_slope_deg, thresholds.max_rock);
  return stack;
}

double edge_slope(const MapStack& stack, Cell from, Cell to) {
  const auto& g = stack.geometry();
  if (!g.contains(from) || !g.contains(to) || !are_neighbors(from, to)) {
    throw RangeError(fmt::format("cells ({}, {}) and ({}, {}) are not adjacent", from.row, from.col, to.row, to.col));
  }
  const auto& elev = stack.layer(LayerKind::elevation);
  if (elev.is_missing(from) || elev.is_missing(to)) return std::numeric_limits<double>::quiet_NaN();
  return slope_deg(elev.at(to) - elev.at(from), g.distance(from, to));
}

MapLayer derive_banned_mask(const MapStack& stack, double max_slope_deg, double max_rock) {
  std::array<MapLayer, kLayerKindCount> layers{stack.layer(LayerKind::elevation), stack.layer(LayerKind::rock_abundance),
                                               stack.layer(LayerKind::scientific_interest),
                                               stack.layer(LayerKind::banned)};
  const auto mask = compute_ban(layers, max_slope_deg, max_rock);
  MapLayer out = MapLayer::filled(LayerKind::banned, stack.geometry(), 0.0);
  for (std::size_t i = 0; i < mask.size(); ++i) out.values[i] = mask[i];
  return out;
}

std::string serialize(const MapStack& stack) {
  std::ostringstream out;
  for (std::size_t k = 0; k < kLayerKindCount; ++k) {
    const auto kind = static_cast<LayerKind>(k);
    out << "# layer " << to_string(kind) << '\n';
    write_layer(out, stack.layer(kind));
  }
  out << "# effective_banned " << fmt::format("{} {}", stack.thresholds().max_slope_deg, stack.thresholds().max_rock)
      << '\n';
  const auto& g = stack.geometry();
  for (int r = 0; r < g.n_rows; ++r) {
    for (int c = 0; c < g.n_cols; ++c) out << (stack.banned({r, c}) ? '1' : '0');
    out << '\n';
  }
  return out.str();
}

}  // namespace moplan
