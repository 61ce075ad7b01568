#pragma once

#include <cstdint>
#include <filesystem>

#include "moplan/raster_map.hpp"

namespace moplan {

/// Procedural terrain for desk-scale testing.
struct SynthParams {
  int rows = 64;
  int cols = 64;
  double cell_size = 5.0;
  double x_ll = 0.0;
  double y_ll = 0.0;
  std::uint64_t seed = 0;
  double roughness = 1.0;     // relief scale; 0 gives a flat map
  double rock_density = 1.0;  // rock patches per 256 cells; 0 gives a rock-free map
  int hotspots = 3;           // scientific interest blobs
  int octaves = 5;
};

struct SynthMaps {
  MapLayer elevation;
  MapLayer rock;
  MapLayer science;
  MapLayer banned;
};

SynthMaps synthesize(const SynthParams& params);

/// Writes dem.asc, rock.asc, science.asc and banned.asc into `dir` (created if needed).
void write_synth(const std::filesystem::path& dir, const SynthMaps& maps);

MapStack assemble_synth(const SynthMaps& maps, const BanThresholds& thresholds = {});

}  // namespace moplan
