#pragma once

#include "mci/core.hpp"

#include <vector>

namespace mci {

/// Logistic reveal curve, bounded in [floor, ceiling] and nondecreasing in t.
double reveal_fraction(double t, const SigmoidParams& params);

/// Per-patient reveal minutes for `count` patients: patient n (1-based) is
/// revealed at the earliest integer minute with fraction * count >= n,
/// clamped to at most 90% of the horizon. Result is sorted.
std::vector<int> reveal_schedule(int count, const SigmoidParams& params, int horizon);

/// Ambulances in service at minute t.
int fleet_size_at(const Scenario& scenario, int t);

/// Effective (grown) capacity of a hospital at minute t, before reservations.
ResourceVector effective_capacity(const Hospital& hospital, const SigmoidParams& growth, int t);

}  // namespace mci
