// Canned scenario families: Standard (20 patients), Complex (60 patients) and
// the small 10-patient / 3-hospital family used for desk-scale training.
#pragma once

#include "mci/core.hpp"
#include "mci/generator.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace mci {

GeneratorConfig standard_config(std::uint64_t seed);
GeneratorConfig complex_config(std::uint64_t seed);
GeneratorConfig small_config(std::uint64_t seed);

/// Maximum number of perturbed-seed regenerations for standard_scenario.
inline constexpr int kFeasibilityRetries = 64;

/// Standard-level scenario on which the greedy policy loses nobody. Retries
/// with derived seeds; throws Error(Generation) when every attempt fails.
Scenario standard_scenario(std::uint64_t seed);
Scenario complex_scenario(std::uint64_t seed);

/// "standard" | "complex" | "small"; nullopt for unknown names.
std::optional<GeneratorConfig> preset_config(std::string_view name, std::uint64_t seed);
std::optional<Scenario> preset_scenario(std::string_view name, std::uint64_t seed);

}  // namespace mci
