#pragma once

#include <cstdint>

namespace crplab::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer; bijective with full avalanche.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Key of the index-th child stream of a seed. Replicate r of an experiment
// draws from stream_key(seed, r), so results do not depend on which worker
// runs the replicate or in what order.
inline constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed + kGolden) + index);
}

// Random 64 bits at position `counter` of a stream (counter-based generator:
// a pure function of its arguments, so any position is addressable directly).
inline constexpr std::uint64_t bits_at(std::uint64_t stream, std::uint64_t counter) {
  return mix64(stream + counter * kGolden);
}

// Uniform double in [0, 1) with 53 random bits.
inline double unit_at(std::uint64_t stream, std::uint64_t counter) {
  return static_cast<double>(bits_at(stream, counter) >> 11) * 0x1.0p-53;
}

}  // namespace crplab::rng
