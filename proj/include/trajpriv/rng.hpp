#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace trajpriv {

/// Engine used everywhere a random draw is needed. The helpers below avoid the
/// standard distributions so that outputs are identical across standard libraries.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Mixes a label into a seed; used to derive independent sub-streams.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t value);

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

/// Sub-stream keyed on (seed, label), independent of draw order elsewhere.
inline Rng substream(std::uint64_t seed, std::string_view label) {
  return make_rng(derive_seed(seed, label));
}

/// Uniform integer in [0, n) by rejection; n must be positive.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace trajpriv
