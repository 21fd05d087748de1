// Portable PRNG. The engine is std::mt19937_64, whose output sequence is fixed
// by the C++ standard; all distribution mappings are done here rather than
// through <random> distributions, which differ between standard libraries.
#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mci {

/// SplitMix64 finaliser, used to derive independent child seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi], unbiased (rejection sampling).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  bool bernoulli(double p) { return uniform01() < p; }

  /// Index drawn proportionally to weights (need not be normalised).
  std::size_t categorical(std::span<const double> weights);

  /// Standard normal via Box-Muller.
  double normal();

  bool operator==(const Rng&) const = default;

 private:
  std::mt19937_64 engine_;
};

}  // namespace mci
