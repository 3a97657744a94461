#pragma once

#include <cstdint>
#include <random>

namespace toxsearch {

// splitmix64 finalizer; used to derive independent substreams from a
// master seed so that per-generation / per-child randomness does not
// depend on execution order.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = mix64(master ^ mix64(a));
  s = mix64(s ^ mix64(b + 0x632be59bd9b4e019ULL));
  s = mix64(s ^ mix64(c + 0x2545f4914f6cdd1dULL));
  return s;
}

inline std::mt19937_64 substream(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  return std::mt19937_64(derive_seed(master, a, b, c));
}

// Uniform integer in [0, n) that does not depend on the standard
// library's distribution implementation.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) return 0;
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

inline double uniform_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace toxsearch
