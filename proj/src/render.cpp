#include "moplan/render.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "moplan/errors.hpp"

namespace moplan {

namespace {

constexpr std::array<Rgb, kPaletteSize> kPalette{{
    {31, 119, 180},
    {255, 127, 14},
    {44, 160, 44},
    {148, 103, 189},
    {23, 190, 207},
    {188, 189, 34},
    {227, 119, 194},
    {140, 86, 75},
}};

Rgb lighten(Rgb c) {
  return {static_cast<std::uint8_t>((c.r + 255) / 2), static_cast<std::uint8_t>((c.g + 255) / 2),
          static_cast<std::uint8_t>((c.b + 255) / 2)};
}

std::string hex(Rgb c) { return fmt::format("#{:02x}{:02x}{:02x}", c.r, c.g, c.b); }

void check_paths(const GridGeometry& g, std::span<const RenderPath> paths) {
  for (const auto& p : paths) {
    for (const auto& c : p.cells) {
      if (!g.contains(c)) throw RangeError(fmt::format("path cell ({}, {}) is outside the map", c.row, c.col));
    }
  }
}

std::uint8_t shade(const MapStack& stack, Cell c) {
  const auto& st = stack.stats(LayerKind::elevation);
  const double span = st.max - st.min;
  const double t = span > 0.0 ? (stack.elevation(c) - st.min) / span : 0.5;
  return static_cast<std::uint8_t>(std::lround(40.0 + 175.0 * std::clamp(t, 0.0, 1.0)));
}

void draw_line(Image& img, int x0, int y0, int x1, int y1, int thickness, Rgb color) {
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  const int lo = -(thickness - 1) / 2;
  const int hi = thickness / 2;
  while (true) {
    for (int oy = lo; oy <= hi; ++oy) {
      for (int ox = lo; ox <= hi; ++ox) img.set(x0 + ox, y0 + oy, color);
    }
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace

Rgb member_color(std::size_t group) { return kPalette[group % kPaletteSize]; }
Rgb highlight_color(std::size_t group) { return lighten(kPalette[group % kPaletteSize]); }

Image::Image(int width, int height, Rgb fill)
    : width_(width), height_(height), pixels_(static_cast<std::size_t>(width) * height, fill) {}

void Image::set(int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
  pixels_[static_cast<std::size_t>(y) * width_ + x] = c;
}

void Image::write_ppm(std::ostream& out) const {
  out << "P6\n" << width_ << ' ' << height_ << "\n255\n";
  for (const auto& p : pixels_) {
    const char rgb[3] = {static_cast<char>(p.r), static_cast<char>(p.g), static_cast<char>(p.b)};
    out.write(rgb, 3);
  }
}

Image render_image(const MapStack& stack, std::span<const RenderPath> paths, const RenderOptions& options) {
  const auto& g = stack.geometry();
  check_paths(g, paths);
  const int s = std::max(1, options.scale);
  Image img(g.n_cols * s, g.n_rows * s);
  for (int r = 0; r < g.n_rows; ++r) {
    for (int c = 0; c < g.n_cols; ++c) {
      const std::uint8_t v = shade(stack, {r, c});
      const bool banned = stack.banned({r, c});
      for (int y = 0; y < s; ++y) {
        for (int x = 0; x < s; ++x) {
          const int px = c * s + x;
          const int py = r * s + y;
          const bool hatch = banned && ((px + py) % 4 == 0);
          img.set(px, py, hatch ? kBannedHatch : Rgb{v, v, v});
        }
      }
    }
  }
  const auto center = [s](Cell c) { return std::pair{c.col * s + s / 2, c.row * s + s / 2}; };
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& p : paths) {
      if (p.highlight != (pass == 1)) continue;
      const Rgb color = p.highlight ? highlight_color(p.group) : member_color(p.group);
      const int thickness = p.highlight ? std::max(2, s / 2) : 1;
      if (p.cells.size() == 1) {
        const auto [x, y] = center(p.cells.front());
        draw_line(img, x, y, x, y, thickness, color);
      }
      for (std::size_t i = 1; i < p.cells.size(); ++i) {
        const auto [x0, y0] = center(p.cells[i - 1]);
        const auto [x1, y1] = center(p.cells[i]);
        draw_line(img, x0, y0, x1, y1, thickness, color);
      }
    }
  }
  return img;
}

std::string render_svg(const MapStack& stack, std::span<const RenderPath> paths, const RenderOptions& options) {
  const auto& g = stack.geometry();
  check_paths(g, paths);
  const int s = std::max(1, options.scale);
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
      "<defs><pattern id=\"hatch\" width=\"4\" height=\"4\" patternUnits=\"userSpaceOnUse\">"
      "<path d=\"M0,4 L4,0\" stroke=\"{}\" stroke-width=\"1\"/></pattern></defs>\n<g shape-rendering=\"crispEdges\">\n",
      g.n_cols * s, g.n_rows * s, g.n_cols * s, g.n_rows * s, hex(kBannedHatch));
  for (int r = 0; r < g.n_rows; ++r) {
    for (int c = 0; c < g.n_cols; ++c) {
      const std::uint8_t v = shade(stack, {r, c});
      out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>", c * s, r * s, s, s,
                         hex({v, v, v}));
      if (stack.banned({r, c})) {
        out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"url(#hatch)\"/>", c * s, r * s, s,
                           s);
      }
    }
    out += '\n';
  }
  out += "</g>\n";
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& p : paths) {
      if (p.highlight != (pass == 1) || p.cells.empty()) continue;
      const Rgb color = p.highlight ? highlight_color(p.group) : member_color(p.group);
      std::string points;
      for (const auto& c : p.cells) {
        if (!points.empty()) points += ' ';
        points += fmt::format("{},{}", c.col * s + s / 2.0, c.row * s + s / 2.0);
      }
      out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"/>\n", points,
                         hex(color), p.highlight ? std::max(2, s / 2) : 1);
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace moplan
