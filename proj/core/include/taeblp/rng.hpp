#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace taeblp {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream number `index` of a master seed (counter-mode split).
/// `lane` separates several streams used by the same replica.
inline Rng make_stream(std::uint64_t master, std::uint64_t index, std::uint64_t lane = 0) {
  const std::uint64_t key =
      splitmix64(master ^ splitmix64(index * 0xD1B54A32D192ED03ULL + splitmix64(lane + 1)));
  return Rng(key);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Exponential variate with the given rate; never returns +inf.
inline double exponential(Rng& rng, double rate) noexcept {
  return -std::log1p(-uniform01(rng)) / rate;
}

}  // namespace taeblp
