#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace monodromy {

// Seeded randomness. Every stream is derived from (seed, purpose tag, index)
// so that fabrication and sweeps are order-independent and reproducible.
// Sampling helpers are written out explicitly because the std distributions
// are implementation-defined and would break bit-exact datafiles across
// standard libraries.

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 20180705;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t tag_hash(std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                                    std::uint64_t index = 0) noexcept {
  return splitmix64(splitmix64(seed ^ tag_hash(tag)) + splitmix64(index));
}

inline Rng make_rng(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) {
  return Rng{derive_seed(seed, tag, index)};
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on {0, ..., bound-1}; rejection sampling, no modulo bias.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

inline bool bernoulli(Rng& rng, double p) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return uniform01(rng) < p;
}

// Number of Bernoulli(p) trials needed to observe n successes (support >= n).
inline std::uint64_t negative_binomial_trials(Rng& rng, std::uint64_t n, double p) {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  while (successes < n) {
    ++trials;
    if (bernoulli(rng, p)) ++successes;
  }
  return trials;
}

}  // namespace monodromy
