#pragma once

#include <cstdint>
#include <random>

namespace apt {

// One generator per concurrent consumer (one per temperature level plus one
// for the swap phase).  Streams are pure functions of (seed, stream id), so
// results do not depend on how the random walk phase is scheduled.
using Rng = std::mt19937_64;

// splitmix64 finalizer; decorrelates nearby (seed, stream) pairs.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream_id) {
  return mix64(mix64(seed) ^ mix64(stream_id * 0x9e3779b97f4a7c15ULL + 1));
}

inline Rng make_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return Rng(stream_seed(seed, stream_id));
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace apt
