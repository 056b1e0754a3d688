// Seed-stable uniform draws: raw mt19937_64 bits mapped to doubles directly,
// so results do not depend on library distribution internals.
#pragma once

#include <cstdint>
#include <random>

namespace dyad {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double a, double b) {
  return a + (b - a) * uniform01(rng);
}

// inclusive range
inline int64_t uniform_int(std::mt19937_64& rng, int64_t lo, int64_t hi) {
  return lo + static_cast<int64_t>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

inline std::mt19937_64 seeded_rng(uint64_t seed) {
  return std::mt19937_64(seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull);
}

}  // namespace dyad
