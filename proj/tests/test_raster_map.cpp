#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "moplan/errors.hpp"
#include "moplan/raster_map.hpp"
#include "support/oracles.hpp"

namespace moplan {
namespace {

using testing::flat_stack;
using testing::make_stack;

std::string grid_text(int rows, int cols, double value, double cell = 1.0) {
  std::string s = "ncols " + std::to_string(cols) + "\nnrows " + std::to_string(rows) +
                  "\nxllcorner 0\nyllcorner 0\ncellsize " + std::to_string(cell) + "\nnodata_value -9999\n";
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) s += (c ? " " : "") + std::to_string(value);
    s += "\n";
  }
  return s;
}

MapLayer parse(const std::string& text, LayerKind kind = LayerKind::elevation) {
  std::istringstream in(text);
  return parse_layer(in, kind);
}

TEST(LoadLayer, ConstantThreeByThree) {
  const MapLayer layer = parse(grid_text(3, 3, 0.0));
  EXPECT_EQ(layer.geometry.n_rows, 3);
  EXPECT_EQ(layer.geometry.n_cols, 3);
  ASSERT_EQ(layer.values.size(), 9u);
  for (double v : layer.values) EXPECT_EQ(v, 0.0);
  for (auto m : layer.missing) EXPECT_EQ(m, 0);
}

TEST(LoadLayer, HeaderKeysInAnyOrderAndCase) {
  const std::string text =
      "CELLSIZE 2.5\nNoData_Value -1\nyllcorner 10\nxllcorner 20\nNROWS 2\nncols 3\n1 2 3\n4 -1 6\n";
  const MapLayer layer = parse(text);
  EXPECT_EQ(layer.geometry.cell_size, 2.5);
  EXPECT_EQ(layer.geometry.x_ll, 20.0);
  EXPECT_EQ(layer.geometry.y_ll, 10.0);
  EXPECT_EQ(layer.at({0, 2}), 3.0);
  EXPECT_TRUE(layer.is_missing({1, 1}));
  EXPECT_EQ(layer.at({1, 1}), 0.0);
}

TEST(LoadLayer, ShortRowIsParseError) {
  std::string text = grid_text(3, 4, 1.0);
  text.replace(text.rfind(" 1.000000"), 9, "");  // last row loses a column
  EXPECT_THROW(parse(text), ParseError);
}

TEST(LoadLayer, HeaderSaysMoreColumnsThanRowsHold) {
  std::string text = grid_text(2, 255, 1.0);
  text.replace(text.find("ncols 255"), 9, "ncols 256");
  EXPECT_THROW(parse(text), ParseError);
}

TEST(LoadLayer, RowCountMismatchIsParseError) {
  std::string text = grid_text(3, 3, 1.0);
  text.replace(text.find("nrows 3"), 7, "nrows 4");
  EXPECT_THROW(parse(text), ParseError);
  std::string extra = grid_text(3, 3, 1.0) + "1 1 1\n";
  EXPECT_THROW(parse(extra), ParseError);
}

TEST(LoadLayer, MalformedHeaderAndValues) {
  EXPECT_THROW(parse("ncols 2\nnrows 2\n1 2\n3 4\n"), ParseError);
  std::string bad = grid_text(2, 2, 1.0);
  bad.replace(bad.rfind("1.000000"), 8, "abc");
  EXPECT_THROW(parse(bad), ParseError);
  std::string dup = grid_text(2, 2, 1.0);
  dup.replace(dup.find("yllcorner"), 9, "xllcorner");
  EXPECT_THROW(parse(dup), ParseError);
}

TEST(LoadLayer, RockOutOfRange) {
  EXPECT_THROW(parse(grid_text(2, 2, 1.5), LayerKind::rock_abundance), RangeError);
  EXPECT_THROW(parse(grid_text(2, 2, -0.01), LayerKind::rock_abundance), RangeError);
  const MapLayer near_one = parse(grid_text(2, 2, 1.0000005), LayerKind::rock_abundance);
  EXPECT_EQ(near_one.values[0], 1.0);
}

TEST(LoadLayer, ScienceOutsideUnitIntervalIsRescaled) {
  const std::string text =
      "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nnodata_value -9999\n10 20\n30 50\n";
  const MapLayer layer = parse(text, LayerKind::scientific_interest);
  EXPECT_DOUBLE_EQ(layer.at({0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(layer.at({0, 1}), 0.25);
  EXPECT_DOUBLE_EQ(layer.at({1, 1}), 1.0);
}

TEST(LoadLayer, BannedMustBeBinary) {
  EXPECT_THROW(parse(grid_text(2, 2, 2.0), LayerKind::banned), RangeError);
  EXPECT_NO_THROW(parse(grid_text(2, 2, 1.0), LayerKind::banned));
}

TEST(LoadLayer, DegenerateGeometry) {
  // a bad header is a malformed file, not a grid mismatch
  EXPECT_THROW(parse(grid_text(1, 3, 0.0)), ParseError);
  std::string zero_cell = grid_text(2, 2, 0.0);
  zero_cell.replace(zero_cell.find("cellsize 1.000000"), 17, "cellsize 0");
  EXPECT_THROW(parse(zero_cell), ParseError);
  EXPECT_THROW((GridGeometry{1, 3, 1.0, 0, 0, -9999}.validate()), GeometryError);
}

TEST(LoadLayer, WriteParseRoundTrip) {
  const MapLayer a = parse(
      "ncols 3\nnrows 2\nxllcorner 1.5\nyllcorner -2\ncellsize 4.76\nnodata_value -9999\n"
      "0.1 -9999 123.456789\n1e-7 -3.25 0\n");
  std::ostringstream out;
  write_layer(out, a);
  const MapLayer b = parse(out.str());
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.missing, b.missing);
  EXPECT_TRUE(a.geometry.same_grid(b.geometry));
}

TEST(AssembleStack, ElevationOnlyDefaultsOtherLayersToZero) {
  const MapStack s = flat_stack(4, 5);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 5; ++c) {
      EXPECT_EQ(s.interest({r, c}), 0.0);
      EXPECT_FALSE(s.banned({r, c}));
    }
  }
}

TEST(AssembleStack, GeometryMismatch) {
  const GridGeometry g64{64, 64, 1.0, 0, 0, -9999};
  const GridGeometry g32{32, 32, 1.0, 0, 0, -9999};
  EXPECT_THROW(assemble_stack({MapLayer::filled(LayerKind::elevation, g64, 0.0),
                               MapLayer::filled(LayerKind::rock_abundance, g32, 0.0)}),
               GeometryError);
  const GridGeometry shifted{64, 64, 1.0, 5.0, 0, -9999};
  EXPECT_THROW(assemble_stack({MapLayer::filled(LayerKind::elevation, g64, 0.0),
                               MapLayer::filled(LayerKind::scientific_interest, shifted, 0.0)}),
               GeometryError);
}

TEST(AssembleStack, DuplicateKind) {
  const GridGeometry g{4, 4, 1.0, 0, 0, -9999};
  EXPECT_THROW(assemble_stack({MapLayer::filled(LayerKind::elevation, g, 0.0),
                               MapLayer::filled(LayerKind::elevation, g, 1.0)}),
               GeometryError);
}

TEST(AssembleStack, FullFourLayerStackAtWideShape) {
  const GridGeometry g{256, 237, 4.76, 0, 0, -9999};
  const MapStack s = assemble_stack({MapLayer::filled(LayerKind::elevation, g, 100.0),
                                     MapLayer::filled(LayerKind::rock_abundance, g, 0.01),
                                     MapLayer::filled(LayerKind::scientific_interest, g, 0.5),
                                     MapLayer::filled(LayerKind::banned, g, 0.0)});
  EXPECT_EQ(s.geometry().n_rows, 256);
  EXPECT_EQ(s.geometry().n_cols, 237);
  EXPECT_EQ(s.stats(LayerKind::rock_abundance).max, 0.01);
}

TEST(AssembleStack, SerializationIsDeterministic) {
  const auto make = [] {
    return make_stack(6, 7, 2.0, [](int r, int c) { return 0.37 * r - 0.11 * c * c; },
                      [](int r, int c) { return 0.01 * ((r + c) % 5); });
  };
  EXPECT_EQ(serialize(make()), serialize(make()));
}

TEST(EdgeSlope, FlatIsZero) {
  const MapStack s = flat_stack(3, 3, 5.0);
  EXPECT_EQ(edge_slope(s, {1, 1}, {0, 1}), 0.0);
  EXPECT_EQ(edge_slope(s, {1, 1}, {2, 2}), 0.0);
}

TEST(EdgeSlope, RiseEqualToCellSizeIsFortyFiveDegrees) {
  const MapStack s = make_stack(3, 3, 4.0, [](int, int c) { return 4.0 * c; }, {}, {}, {}, {90.0, 1.0});
  EXPECT_NEAR(edge_slope(s, {1, 0}, {1, 1}), 45.0, 1e-12);
  EXPECT_NEAR(edge_slope(s, {1, 1}, {1, 0}), -45.0, 1e-12);
  // diagonal: rise 4 over sqrt(2) * 4
  EXPECT_NEAR(edge_slope(s, {0, 0}, {1, 1}), std::atan(1.0 / std::numbers::sqrt2) * 180.0 / std::numbers::pi, 1e-12);
}

TEST(EdgeSlope, Antisymmetric) {
  const MapStack s = make_stack(5, 5, 3.0, [](int r, int c) { return std::sin(r * 1.3) * 4.0 + c * c * 0.2; }, {},
                                {}, {}, {90.0, 1.0});
  for (int r = 1; r < 4; ++r) {
    for (int c = 1; c < 4; ++c) {
      for (const auto& d : kDirections) {
        const Cell a{r, c};
        const Cell b{r + d.d_row, c + d.d_col};
        EXPECT_EQ(edge_slope(s, a, b), -edge_slope(s, b, a));
      }
    }
  }
}

TEST(EdgeSlope, NonAdjacentThrows) {
  const MapStack s = flat_stack(4, 4);
  EXPECT_THROW(edge_slope(s, {0, 0}, {0, 2}), RangeError);
  EXPECT_THROW(edge_slope(s, {0, 0}, {0, 0}), RangeError);
}

TEST(DeriveBanned, UniformRockAboveThresholdBansEverything) {
  const MapStack s = make_stack(4, 4, 1.0, [](int, int) { return 0.0; }, [](int, int) { return 0.5; });
  for (auto b : s.banned_mask()) EXPECT_EQ(b, 1);
}

TEST(DeriveBanned, RockFreeFlatMapUnchanged) {
  const MapStack s = make_stack(4, 4, 1.0, [](int, int) { return 0.0; }, [](int, int) { return 0.0; }, {},
                                [](int r, int c) { return r == 2 && c == 1; });
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) EXPECT_EQ(s.banned({r, c}), r == 2 && c == 1);
  }
}

TEST(DeriveBanned, FortyFiveDegreeStepBansBothCells) {
  // single raised cell at (2, 2): its 8 neighbors and itself see a 45 deg (axis) or 35.3 deg (diagonal) edge
  const MapStack s = make_stack(5, 5, 2.0, [](int r, int c) { return r == 2 && c == 2 ? 2.0 : 0.0; });
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) {
      const bool near = std::abs(r - 2) <= 1 && std::abs(c - 2) <= 1;
      EXPECT_EQ(s.banned({r, c}), near) << r << "," << c;
    }
  }
}

TEST(DeriveBanned, MissingElevationIsBanned) {
  const GridGeometry g{3, 3, 1.0, 0, 0, -9999};
  MapLayer dem = MapLayer::filled(LayerKind::elevation, g, 0.0);
  dem.missing[g.index({1, 1})] = 1;
  const MapStack s = assemble_stack({dem});
  EXPECT_TRUE(s.banned({1, 1}));
  EXPECT_FALSE(s.banned({0, 0}));
}

TEST(DeriveBanned, MonotoneInThresholds) {
  const auto elev = [](int r, int c) { return 3.0 * std::sin(0.9 * r) * std::cos(0.7 * c) + 0.4 * r * c; };
  const auto rock = [](int r, int c) { return 0.05 * ((r * 7 + c * 3) % 9); };
  const MapStack loose = make_stack(12, 12, 2.0, elev, rock, {}, {}, {35.0, 0.35});
  for (double slope : {30.0, 20.0, 10.0}) {
    for (double max_rock : {0.3, 0.2, 0.1}) {
      const MapLayer tight = derive_banned_mask(loose, slope, max_rock);
      const MapLayer looser = derive_banned_mask(loose, slope + 5.0, max_rock + 0.05);
      for (std::size_t i = 0; i < tight.values.size(); ++i) {
        if (looser.values[i] != 0.0) EXPECT_NE(tight.values[i], 0.0);
      }
    }
  }
}

TEST(Geometry, CentersAndWorldLookup) {
  const GridGeometry g{4, 3, 2.0, 100.0, 50.0, -9999};
  // row 0 is the north edge: its centers sit one half cell below y_ll + rows * cell
  const auto [x, y] = g.center({0, 0});
  EXPECT_DOUBLE_EQ(x, 101.0);
  EXPECT_DOUBLE_EQ(y, 57.0);
  EXPECT_EQ(*g.cell_at(101.0, 57.0), (Cell{0, 0}));
  EXPECT_EQ(*g.cell_at(105.9, 50.1), (Cell{3, 2}));
  EXPECT_FALSE(g.cell_at(99.0, 55.0).has_value());
  EXPECT_DOUBLE_EQ(g.distance({0, 0}, {1, 1}), 2.0 * std::numbers::sqrt2);
}

TEST(Geometry, DirectionOrder) {
  const char* names[] = {"N", "NE", "E", "SE", "S", "SW", "W", "NW"};
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(kDirections[i].name, names[i]);
    EXPECT_EQ(direction_index({5, 5}, {5 + kDirections[i].d_row, 5 + kDirections[i].d_col}), i);
  }
  EXPECT_FALSE(direction_index({0, 0}, {2, 0}).has_value());
}

}  // namespace
}  // namespace moplan
