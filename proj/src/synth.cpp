#include "moplan/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <fmt/format.h>

#include "moplan/errors.hpp"
#include "moplan/random.hpp"

namespace moplan {

namespace {

constexpr double kReliefFraction = 0.03;  // rolling relief amplitude per unit roughness, relative to map extent
constexpr double kOctaveGain = 0.4;
constexpr double kCraterRadius[2] = {1.5, 7.0};  // cells, independent of map size
constexpr double kCraterDepthRatio = 0.4;  // depth / radius; bowl walls reach ~39 degrees at the rim

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// One octave of value noise sampled at every cell.
void add_octave(std::vector<double>& field, int rows, int cols, double spacing, double amplitude,
                std::mt19937_64& engine) {
  const int lr = static_cast<int>(std::ceil(rows / spacing)) + 2;
  const int lc = static_cast<int>(std::ceil(cols / spacing)) + 2;
  std::vector<double> lattice(static_cast<std::size_t>(lr) * static_cast<std::size_t>(lc));
  for (auto& v : lattice) v = uniform(engine, -1.0, 1.0);
  const auto at = [&](int r, int c) { return lattice[static_cast<std::size_t>(r) * static_cast<std::size_t>(lc) + c]; };
  for (int r = 0; r < rows; ++r) {
    const double fr = r / spacing;
    const int r0 = static_cast<int>(fr);
    const double tr = smoothstep(fr - r0);
    for (int c = 0; c < cols; ++c) {
      const double fc = c / spacing;
      const int c0 = static_cast<int>(fc);
      const double tc = smoothstep(fc - c0);
      const double top = at(r0, c0) * (1.0 - tc) + at(r0, c0 + 1) * tc;
      const double bottom = at(r0 + 1, c0) * (1.0 - tc) + at(r0 + 1, c0 + 1) * tc;
      field[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + c] += amplitude * (top * (1.0 - tr) + bottom * tr);
    }
  }
}

struct Blob {
  double row, col, radius, peak;
};

double blob_value(const Blob& b, int r, int c) {
  const double d2 = (r - b.row) * (r - b.row) + (c - b.col) * (c - b.col);
  return b.peak * std::exp(-d2 / (2.0 * b.radius * b.radius));
}

// Rounds to 1e-6 so the ASCII files hold short, exactly reproducible decimals.
double quantize(double v) { return std::round(v * 1e6) / 1e6; }

}  // namespace

SynthMaps synthesize(const SynthParams& p) {
  GridGeometry g{p.rows, p.cols, p.cell_size, p.x_ll, p.y_ll, -9999.0};
  g.validate();
  if (p.roughness < 0.0 || p.rock_density < 0.0 || p.hotspots < 0 || p.octaves < 1) {
    throw ConfigError("synth parameters must be non-negative");
  }
  const std::size_t n = g.cell_count();
  // independent streams per layer so changing one parameter leaves the other layers untouched
  std::mt19937_64 elev_rng(p.seed * 4 + 1);
  std::mt19937_64 rock_rng(p.seed * 4 + 2);
  std::mt19937_64 sci_rng(p.seed * 4 + 3);

  SynthMaps maps{MapLayer::filled(LayerKind::elevation, g, 0.0), MapLayer::filled(LayerKind::rock_abundance, g, 0.0),
                 MapLayer::filled(LayerKind::scientific_interest, g, 0.0), MapLayer::filled(LayerKind::banned, g, 0.0)};

  if (p.roughness > 0.0) {
    const double extent = std::max(p.rows, p.cols) * p.cell_size;
    std::vector<double> field(n, 0.0);
    double spacing = std::max(p.rows, p.cols) / 2.0;
    double amplitude = 1.0;
    for (int o = 0; o < p.octaves && spacing >= 1.0; ++o) {
      add_octave(field, p.rows, p.cols, spacing, amplitude, elev_rng);
      spacing /= 2.0;
      amplitude *= kOctaveGain;
    }
    const double scale = p.roughness * kReliefFraction * extent;
    for (auto& v : field) v *= scale;
    const int craters = static_cast<int>(std::lround(p.roughness * static_cast<double>(n) / 512.0));
    for (int i = 0; i < craters; ++i) {
      const double cr = uniform(elev_rng, 0, p.rows);
      const double cc = uniform(elev_rng, 0, p.cols);
      const double radius = uniform(elev_rng, kCraterRadius[0], kCraterRadius[1]);
      const double depth = kCraterDepthRatio * radius * p.cell_size;
      for (int r = std::max(0, static_cast<int>(cr - 2 * radius)); r < std::min(p.rows, static_cast<int>(cr + 2 * radius) + 1); ++r) {
        for (int c = std::max(0, static_cast<int>(cc - 2 * radius)); c < std::min(p.cols, static_cast<int>(cc + 2 * radius) + 1); ++c) {
          const double u = std::hypot(r - cr, c - cc) / radius;
          const double rim = 0.25 * depth * std::exp(-(u - 1.0) * (u - 1.0) / 0.18);
          const double bowl = u < 1.0 ? depth * (u * u - 1.0) : 0.0;
          field[g.index({r, c})] += bowl + rim;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) maps.elevation.values[i] = quantize(field[i]);
  }

  if (p.rock_density > 0.0) {
    const int patches = static_cast<int>(std::lround(p.rock_density * static_cast<double>(n) / 256.0));
    std::vector<Blob> blobs;
    for (int i = 0; i < patches; ++i) {
      blobs.push_back({uniform(rock_rng, 0, p.rows), uniform(rock_rng, 0, p.cols), uniform(rock_rng, 1.0, 4.0),
                       uniform(rock_rng, 0.05, 0.5)});
    }
    const double background = std::min(1.0, p.rock_density) * 0.03;
    for (int r = 0; r < p.rows; ++r) {
      for (int c = 0; c < p.cols; ++c) {
        double v = background * uniform01(rock_rng);
        for (const auto& b : blobs) v += blob_value(b, r, c);
        maps.rock.values[g.index({r, c})] = quantize(std::clamp(v, 0.0, 1.0));
      }
    }
  }

  if (p.hotspots > 0) {
    std::vector<Blob> blobs;
    const double base = std::min(p.rows, p.cols);
    for (int i = 0; i < p.hotspots; ++i) {
      blobs.push_back({uniform(sci_rng, 0, p.rows), uniform(sci_rng, 0, p.cols),
                       uniform(sci_rng, 0.04 * base + 1.0, 0.12 * base + 1.0), 1.0});
    }
    for (int r = 0; r < p.rows; ++r) {
      for (int c = 0; c < p.cols; ++c) {
        double v = 0.0;
        for (const auto& b : blobs) v = std::max(v, blob_value(b, r, c));
        maps.science.values[g.index({r, c})] = quantize(v);
      }
    }
  }
  return maps;
}

void write_synth(const std::filesystem::path& dir, const SynthMaps& maps) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  save_layer(dir / "dem.asc", maps.elevation);
  save_layer(dir / "rock.asc", maps.rock);
  save_layer(dir / "science.asc", maps.science);
  save_layer(dir / "banned.asc", maps.banned);
}

MapStack assemble_synth(const SynthMaps& maps, const BanThresholds& thresholds) {
  return assemble_stack({maps.elevation, maps.rock, maps.science, maps.banned}, thresholds);
}

}  // namespace moplan
