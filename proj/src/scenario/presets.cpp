#include "mci/presets.hpp"
#include "mci/error.hpp"
#include "mci/evaluate.hpp"
#include "mci/rng.hpp"

#include <memory>

namespace mci {

GeneratorConfig standard_config(std::uint64_t seed) {
  GeneratorConfig c;
  c.patient_count = 20;
  c.hospital_count = 5;
  c.fleet_size_max = 6;
  c.travel_time_range = {8, 45};
  c.horizon = 360;
  c.seed = seed;
  return c;
}

GeneratorConfig complex_config(std::uint64_t seed) {
  GeneratorConfig c;
  c.patient_count = 60;
  c.hospital_count = 8;
  c.fleet_size_max = 16;
  c.travel_time_range = {8, 45};
  c.horizon = 480;
  c.seed = seed;
  return c;
}

GeneratorConfig small_config(std::uint64_t seed) {
  GeneratorConfig c;
  c.patient_count = 10;
  c.hospital_count = 3;
  c.fleet_size_max = 2;
  c.travel_time_range = {8, 30};
  c.horizon = 300;
  c.seed = seed;
  return c;
}

namespace {

bool greedy_saves_everyone(const std::shared_ptr<const Scenario>& scenario) {
  Rng rng(0);
  const EpisodeResult r = run_episode(Policy::greedy(), scenario, rng, ActMode::Argmax);
  for (const auto& p : r.final_state.patients)
    if (p.status == PatientStatus::Deceased) return false;
  return true;
}

}  // namespace

Scenario standard_scenario(std::uint64_t seed) {
  GeneratorConfig config = standard_config(seed);
  for (int attempt = 0; attempt < kFeasibilityRetries; ++attempt) {
    if (attempt > 0) config.seed = splitmix64(seed + static_cast<std::uint64_t>(attempt));
    auto scenario = std::make_shared<const Scenario>(generate_scenario(config));
    if (greedy_saves_everyone(scenario)) return *scenario;
  }
  throw Error(ErrorCode::Generation, "no feasible standard scenario for seed " + std::to_string(seed) + " after " +
                                         std::to_string(kFeasibilityRetries) + " attempts");
}

Scenario complex_scenario(std::uint64_t seed) { return generate_scenario(complex_config(seed)); }

std::optional<GeneratorConfig> preset_config(std::string_view name, std::uint64_t seed) {
  if (name == "standard") return standard_config(seed);
  if (name == "complex") return complex_config(seed);
  if (name == "small") return small_config(seed);
  return std::nullopt;
}

std::optional<Scenario> preset_scenario(std::string_view name, std::uint64_t seed) {
  if (name == "standard") return standard_scenario(seed);
  if (name == "complex") return complex_scenario(seed);
  if (name == "small") return generate_scenario(small_config(seed));
  return std::nullopt;
}

}  // namespace mci
