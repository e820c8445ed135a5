#pragma once

#include <cstdint>
#include <vector>

namespace exchangelab {

// Counter-based uniform generator. Every variate is a pure function of
// (seed, stream, counter), so parallel workers can draw for disjoint index
// ranges in any order and still reproduce the sequential output bit for bit.
struct CounterRng {
  std::uint64_t seed = 0;

  // Uniform in [0, 1). stream selects an independent lane (e.g. a sample
  // path index), counter the position within it (e.g. a coordinate).
  double u01(std::uint64_t stream, std::uint64_t counter) const;

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const;

  // Uniform in {0, ..., n-1} by rejection-free scaling; fine for the small n
  // used here (alphabet sizes, shuffle indices).
  std::uint64_t below(std::uint64_t stream, std::uint64_t counter,
                      std::uint64_t n) const;
};

// Deterministic Fisher-Yates shuffle of {0,...,n-1} driven by CounterRng.
std::vector<int> shuffled_identity(const CounterRng& rng, std::uint64_t stream,
                                   int n);

}  // namespace exchangelab
