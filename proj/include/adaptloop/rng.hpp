#pragma once

#include <cstdint>
#include <random>

namespace adaptloop {

using Rng = std::mt19937_64;

// Named substreams. Every random draw in the library comes from a generator
// keyed by (master seed, stream, counter), so results never depend on the
// order in which independent tasks run.
enum class Stream : std::uint64_t {
  kLandscapeTable = 1,
  kWalkStart = 2,
  kTieBreak = 3,
  kRuggednessWalk = 4,
  kPhysiology = 5,
  kScenario = 6,
  kBootstrap = 7,
  kEnsembleMember = 8,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t substream_seed(std::uint64_t master, Stream stream,
                                       std::uint64_t counter = 0) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  return splitmix64(h + counter);
}

inline Rng make_rng(std::uint64_t master, Stream stream, std::uint64_t counter = 0) {
  return Rng(substream_seed(master, stream, counter));
}

// Uniform double in [0, 1) built from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace adaptloop
