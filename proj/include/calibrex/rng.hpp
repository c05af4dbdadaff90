#pragma once

#include <cstdint>
#include <random>

namespace calibrex {

using Rng = std::mt19937_64;

// std::uniform_int_distribution differs between standard libraries; this
// keeps seeded runs identical across toolchains.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % n);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

// 53-bit uniform double in [0, 1).
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace calibrex
