#pragma once

#include <cstdint>
#include <random>

namespace ablip {

// splitmix64; used to derive independent seed streams from a base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derived stream for a (seed, a, b, c) tuple. Streams for distinct tuples are
// independent for practical purposes, and a given tuple always yields the
// same stream, which is what makes sampled experiments reproducible.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(base ^ 0x243f6a8885a308d3ULL);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  return h;
}

inline std::mt19937_64 make_rng(std::uint64_t base, std::uint64_t a,
                                std::uint64_t b = 0, std::uint64_t c = 0) {
  return std::mt19937_64(derive_seed(base, a, b, c));
}

}  // namespace ablip
