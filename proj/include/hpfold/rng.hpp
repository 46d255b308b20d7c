#pragma once

#include <cstdint>
#include <random>

namespace hpfold {

using Rng = std::mt19937_64;

// splitmix64 step; used to derive independent stream seeds from one trial seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Uniform double in [0, 1) with 53 random bits. Hand-rolled instead of
// std::uniform_real_distribution so that draws are bit-stable across
// standard library implementations.
inline double uniformReal01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Unbiased uniform integer in [0, n), n >= 1. Rejection sampling on the top
// of the 64-bit range keeps the draw exact and portable.
inline std::uint64_t uniformIndex(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

// The four named deterministic streams of a trial, all derived from the
// trial seed: network weight initialization, epsilon-greedy exploration,
// replay mini-batch sampling, and greedy tie-breaking.
struct RngStreams {
  Rng weight_init;
  Rng exploration;
  Rng batch_sample;
  Rng tie_break;

  explicit RngStreams(std::uint64_t seed) {
    std::uint64_t s = seed;
    weight_init.seed(splitmix64(s));
    exploration.seed(splitmix64(s));
    batch_sample.seed(splitmix64(s));
    tie_break.seed(splitmix64(s));
  }
};

}  // namespace hpfold
