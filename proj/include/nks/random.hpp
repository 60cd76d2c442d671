#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace nks {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for stream `index` derived from a master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Standard normal draw that depends only on (seed, a, b): a counter-based
/// stream, so draws do not depend on evaluation order.
inline double counter_normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t key = derive_seed(derive_seed(seed, a), b);
  const std::uint64_t r1 = splitmix64(key);
  const std::uint64_t r2 = splitmix64(key ^ 0xD1B54A32D192ED03ULL);
  // 53-bit uniforms in (0, 1] and [0, 1)
  const double u1 = (static_cast<double>(r1 >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(r2 >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
}

}  // namespace nks
