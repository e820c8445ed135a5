#include "exchangelab/rng.hpp"

#include <numeric>

namespace exchangelab {

namespace {

// SplitMix64 finalizer; full avalanche, so chaining it over the key words
// gives a usable counter-mode generator.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t stream,
                               std::uint64_t counter) const {
  return mix64(mix64(mix64(seed) ^ stream) ^ counter);
}

double CounterRng::u01(std::uint64_t stream, std::uint64_t counter) const {
  return (bits(stream, counter) >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::below(std::uint64_t stream, std::uint64_t counter,
                                std::uint64_t n) const {
  return static_cast<std::uint64_t>(u01(stream, counter) * n);
}

std::vector<int> shuffled_identity(const CounterRng& rng, std::uint64_t stream,
                                   int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    auto j = rng.below(stream, static_cast<std::uint64_t>(i),
                       static_cast<std::uint64_t>(i) + 1);
    std::swap(v[i], v[static_cast<int>(j)]);
  }
  return v;
}

}  // namespace exchangelab
