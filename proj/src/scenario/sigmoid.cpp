#include "mci/sigmoid.hpp"
#include "mci/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mci {

double reveal_fraction(double t, const SigmoidParams& p) {
  const double logistic = 1.0 / (1.0 + std::exp(-p.steepness * (t - p.midpoint)));
  return std::clamp(p.floor + (p.ceiling - p.floor) * logistic, p.floor, p.ceiling);
}

std::vector<int> reveal_schedule(int count, const SigmoidParams& params, int horizon) {
  std::vector<int> times;
  times.reserve(static_cast<std::size_t>(std::max(count, 0)));
  const int last = static_cast<int>(std::floor(0.9 * horizon));
  int t = 0;
  for (int n = 1; n <= count; ++n) {
    while (t < last && reveal_fraction(t, params) * count < n) ++t;
    times.push_back(t);
  }
  return times;
}

int fleet_size_at(const Scenario& s, int t) {
  return static_cast<int>(std::floor(s.fleet_size_max * reveal_fraction(t, s.reveal.ambulances) + 1e-9));
}

ResourceVector effective_capacity(const Hospital& h, const SigmoidParams& growth, int t) {
  const double f = reveal_fraction(t, growth);
  ResourceVector out;
  for (int k = 0; k < kResourceKinds; ++k) out[k] = static_cast<int>(std::floor(h.capacities[k] * f + 1e-9));
  return out;
}

// Rng lives here to keep the generator translation units small.

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next());
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return lo + static_cast<std::int64_t>(x % span);
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = uniform01() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  // Rounding can leave u == total; fall back to the last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return i;
  return 0;
}

double Rng::normal() {
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace mci
