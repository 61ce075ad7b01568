#pragma once

#include <cstdint>
#include <random>

namespace moplan {

/// Uniform double in [0, 1) from the top 53 bits of the engine output.
/// Same sequence on every platform, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& engine) { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& engine, double lo, double hi) { return lo + (hi - lo) * uniform01(engine); }

/// Uniform integer in [0, n).
inline std::uint64_t uniform_index(std::mt19937_64& engine, std::uint64_t n) {
  return static_cast<std::uint64_t>(uniform01(engine) * static_cast<double>(n)) % n;
}

}  // namespace moplan
