// Procedural MCI scenario generation. Output is a pure function of the config
// (including its seed).
#pragma once

#include "mci/core.hpp"

#include <array>
#include <cstdint>
#include <optional>

namespace mci {

struct IntRange {
  int lo = 0;
  int hi = 0;
};

struct GeneratorConfig {
  int patient_count = 20;
  /// Probabilities over {Minor, Severe, Critical}.
  std::array<double, 3> severity_mix{0.5, 0.3, 0.2};
  int hospital_count = 5;
  /// Probabilities over levels {1, 2, 3}.
  std::array<double, 3> level_mix{0.3, 0.4, 0.3};
  /// capacity_ranges[level - 1][kind]
  std::array<std::array<IntRange, kResourceKinds>, 3> capacity_ranges = default_capacity_ranges();
  /// requirement_probability[severity - 1][kind], severity in {Minor, Severe, Critical}
  std::array<std::array<double, kResourceKinds>, 3> requirement_probability = default_requirement_probability();
  IntRange travel_time_range{8, 45};
  double critical_window = 60.0;
  double severe_window = 240.0;
  int fleet_size_max = 8;
  int horizon = 360;
  /// Reveal curves; derived from the horizon when unset.
  std::optional<RevealParams> reveal;
  GeoPoint incident_location{43.6532, -79.3832};
  std::uint64_t seed = 0;

  static std::array<std::array<IntRange, kResourceKinds>, 3> default_capacity_ranges();
  static std::array<std::array<double, kResourceKinds>, 3> default_requirement_probability();
};

/// Default curves: patients t0 = 20% horizon, ambulances t0 = 10%, capacity
/// growing 60% -> 100% with t0 = 30%; steepness 10 / horizon.
RevealParams default_reveal_params(int horizon);

/// Throws Error(Config) naming the first offending field.
void validate_config(const GeneratorConfig& config);

Scenario generate_scenario(const GeneratorConfig& config);

}  // namespace mci
