#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace ria {

/// splitmix64 step; the generator behind all randomized routines. Chosen
/// over std::mt19937_64 + std::uniform_int_distribution because the latter
/// is implementation-defined, and permutation outputs must be byte-stable.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class rng64 {
 public:
  explicit rng64(std::uint64_t seed) : state_(seed) {
    // burn one step so that seeds 0 and 1 do not emit near-identical words
    splitmix64(state_);
  }

  std::uint64_t next() { return splitmix64(state_); }

  /// Unbiased draw in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t threshold = (0ULL - n) % n;
    for (;;) {
      std::uint64_t x = next();
      if (x >= threshold) return x % n;
    }
  }

  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on two uniforms (no cached spare, so
  /// draw counts stay predictable for substream users).
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t state_;
};

/// Independent substream for work item `index` under a run-level seed.
/// Every permutation/replicate derives its own stream, so parallel
/// schedules cannot change what any item draws.
inline rng64 substream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
  std::uint64_t mixed = s;
  splitmix64(mixed);
  return rng64(mixed);
}

template <typename T>
void fisher_yates(std::vector<T>& v, rng64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

/// Shuffle so that the first k slots hold a uniform ordered sample of v.
template <typename T>
void partial_fisher_yates(std::vector<T>& v, std::size_t k, rng64& rng) {
  for (std::size_t i = 0; i < k && i + 1 < v.size(); ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.below(v.size() - i));
    std::swap(v[i], v[j]);
  }
}

}  // namespace ria
