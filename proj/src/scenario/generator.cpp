#include "mci/generator.hpp"
#include "mci/error.hpp"
#include "mci/rng.hpp"
#include "mci/sigmoid.hpp"

#include <cmath>
#include <string>

namespace mci {

std::array<std::array<IntRange, kResourceKinds>, 3> GeneratorConfig::default_capacity_ranges() {
  // vent, emergency, icu, or, prbc, burn, peds, obst
  return {{
      {{{2, 6}, {6, 12}, {3, 8}, {2, 6}, {4, 10}, {0, 3}, {0, 3}, {0, 3}}},
      {{{1, 3}, {4, 8}, {1, 4}, {1, 3}, {2, 6}, {0, 1}, {0, 2}, {0, 2}}},
      {{{0, 1}, {2, 6}, {0, 2}, {0, 1}, {0, 3}, {0, 0}, {0, 1}, {0, 1}}},
  }};
}

std::array<std::array<double, kResourceKinds>, 3> GeneratorConfig::default_requirement_probability() {
  return {{
      {{0.00, 0.30, 0.00, 0.05, 0.02, 0.05, 0.05, 0.05}},  // minor
      {{0.10, 0.80, 0.30, 0.40, 0.30, 0.10, 0.05, 0.05}},  // severe
      {{0.40, 1.00, 0.60, 0.50, 0.50, 0.10, 0.05, 0.05}},  // critical
  }};
}

RevealParams default_reveal_params(int horizon) {
  const double h = horizon;
  const double k = 10.0 / h;
  return {{0.2 * h, k, 0.0, 1.0}, {0.1 * h, k, 0.25, 1.0}, {0.3 * h, k, 0.6, 1.0}};
}

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& msg) {
  throw Error(ErrorCode::Config, "generator config field '" + field + "': " + msg);
}

void check_mix(const std::array<double, 3>& mix, const std::string& field) {
  double sum = 0.0;
  for (double p : mix) {
    if (!(p >= 0.0)) config_error(field, "probabilities must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) config_error(field, "probabilities must sum to 1");
}

}  // namespace

void validate_config(const GeneratorConfig& c) {
  if (c.patient_count < 10 || c.patient_count > 500) config_error("patient_count", "must be in [10, 500]");
  check_mix(c.severity_mix, "severity_mix");
  if (c.hospital_count < 1) config_error("hospital_count", "must be >= 1");
  check_mix(c.level_mix, "level_mix");
  for (const auto& level : c.capacity_ranges)
    for (const auto& r : level)
      if (r.lo < 0 || r.hi < r.lo) config_error("capacity_ranges", "ranges must be non-empty and >= 0");
  for (const auto& row : c.requirement_probability)
    for (double p : row)
      if (!(p >= 0.0 && p <= 1.0)) config_error("requirement_probability", "must be in [0, 1]");
  if (c.travel_time_range.lo < 0 || c.travel_time_range.hi < c.travel_time_range.lo)
    config_error("travel_time_range", "must be a non-empty range of minutes >= 0");
  if (!(c.critical_window > 0.0)) config_error("critical_window", "must be > 0");
  if (!(c.severe_window > 0.0)) config_error("severe_window", "must be > 0");
  if (c.fleet_size_max < 1) config_error("fleet_size_max", "must be >= 1");
  if (c.horizon < 1) config_error("horizon", "must be >= 1");
  if (c.reveal) {
    for (const auto* p : {&c.reveal->patients, &c.reveal->ambulances, &c.reveal->capacity})
      if (!(p->steepness > 0.0) || !(p->floor >= 0.0 && p->floor < p->ceiling && p->ceiling <= 1.0))
        config_error("reveal", "requires steepness > 0 and 0 <= floor < ceiling <= 1");
  }
}

Scenario generate_scenario(const GeneratorConfig& c) {
  validate_config(c);
  Rng rng(c.seed);

  Scenario s;
  s.id = "mci-" + std::to_string(c.patient_count) + "p-" + std::to_string(c.hospital_count) + "h-" +
         std::to_string(c.seed);
  s.incident_location = c.incident_location;
  s.reveal = c.reveal ? *c.reveal : default_reveal_params(c.horizon);
  s.fleet_size_max = c.fleet_size_max;
  s.horizon = c.horizon;
  s.seed = c.seed;

  const std::vector<int> reveal = reveal_schedule(c.patient_count, s.reveal.patients, c.horizon);
  s.patients.reserve(static_cast<std::size_t>(c.patient_count));
  for (int i = 0; i < c.patient_count; ++i) {
    Patient p;
    p.id = i + 1;
    p.severity = static_cast<Severity>(1 + rng.categorical(c.severity_mix));
    const auto& probs = c.requirement_probability[static_cast<std::size_t>(p.severity) - 1];
    for (int k = 0; k < kResourceKinds; ++k) p.requirements[k] = rng.bernoulli(probs[k]) ? 1 : 0;
    p.survival_window = p.severity == Severity::Critical ? c.critical_window
                        : p.severity == Severity::Severe ? c.severe_window
                                                         : kUnbounded;
    p.reveal_time = reveal[static_cast<std::size_t>(i)];
    s.patients.push_back(p);
  }

  // One draw per hospital: all casualties originate at the incident site.
  Eigen::VectorXd per_hospital(c.hospital_count);
  s.hospitals.reserve(static_cast<std::size_t>(c.hospital_count));
  for (int j = 0; j < c.hospital_count; ++j) {
    Hospital h;
    h.id = j + 1;
    h.level = 1 + static_cast<int>(rng.categorical(c.level_mix));
    h.name = "Hospital " + std::to_string(h.id) + " (L" + std::to_string(h.level) + ")";
    const auto& ranges = c.capacity_ranges[static_cast<std::size_t>(h.level) - 1];
    for (int k = 0; k < kResourceKinds; ++k)
      h.capacities[k] = static_cast<int>(rng.uniform_int(ranges[k].lo, ranges[k].hi));
    const double minutes = static_cast<double>(rng.uniform_int(c.travel_time_range.lo, c.travel_time_range.hi));
    per_hospital[j] = minutes;
    // Place the hospital on a circle whose radius matches ~0.8 km per minute of road travel.
    const double bearing = 2.0 * M_PI * rng.uniform01();
    const double km = 0.8 * minutes;
    h.location.lat = c.incident_location.lat + km / 111.0 * std::cos(bearing);
    h.location.lon = c.incident_location.lon +
                     km / (111.0 * std::cos(c.incident_location.lat * M_PI / 180.0)) * std::sin(bearing);
    s.hospitals.push_back(std::move(h));
  }
  s.travel = per_hospital.transpose().replicate(c.patient_count, 1);
  return s;
}

}  // namespace mci
