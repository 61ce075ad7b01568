#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "moplan/raster_map.hpp"

namespace moplan {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Fixed palette; group i uses member_color(i) for ordinary paths and highlight_color(i) for its representative.
Rgb member_color(std::size_t group);
Rgb highlight_color(std::size_t group);
inline constexpr Rgb kBannedHatch{150, 30, 30};
inline constexpr std::size_t kPaletteSize = 8;

class Image {
 public:
  Image(int width, int height, Rgb fill = {});
  int width() const { return width_; }
  int height() const { return height_; }
  Rgb at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  void set(int x, int y, Rgb c);
  /// Binary PPM (P6).
  void write_ppm(std::ostream& out) const;

 private:
  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

struct RenderPath {
  std::vector<Cell> cells;
  std::size_t group = 0;
  bool highlight = false;
};

struct RenderOptions {
  int scale = 4;  // pixels per cell
};

/// Grayscale elevation backdrop, hatched banned cells, then member paths and highlighted paths on top.
/// Throws RangeError if a path leaves the grid.
Image render_image(const MapStack& stack, std::span<const RenderPath> paths, const RenderOptions& options = {});
std::string render_svg(const MapStack& stack, std::span<const RenderPath> paths, const RenderOptions& options = {});

}  // namespace moplan
