// Hand-built scenarios for tests. Reveal curves are saturated so hospital
// capacity and the ambulance fleet sit at their nominal values from t = 0.
#pragma once

#include "mci/core.hpp"
#include "mci/engine.hpp"
#include "mci/rng.hpp"

#include <initializer_list>
#include <memory>
#include <vector>

namespace mci::test {

inline SigmoidParams saturated() { return {-100.0, 1.0, 0.0, 1.0}; }

inline ResourceVector rv(std::initializer_list<int> values) {
  ResourceVector v = ResourceVector::Zero();
  int k = 0;
  for (int x : values) v[k++] = x;
  return v;
}

inline Patient patient(int id, Severity s, ResourceVector req, double window, int reveal = 0) {
  Patient p;
  p.id = id;
  p.severity = s;
  p.requirements = req;
  p.survival_window = window;
  p.reveal_time = reveal;
  return p;
}

inline Hospital hospital(int id, int level, ResourceVector caps) {
  Hospital h;
  h.id = id;
  h.name = "H" + std::to_string(id);
  h.level = level;
  h.capacities = caps;
  return h;
}

/// travel[j] is the one-way time to hospital j, shared by every patient.
inline std::shared_ptr<const Scenario> make_scenario(std::vector<Patient> patients, std::vector<Hospital> hospitals,
                                                     std::vector<double> travel, int fleet = 4, int horizon = 300) {
  auto s = std::make_shared<Scenario>();
  s->id = "fixture";
  s->patients = std::move(patients);
  s->hospitals = std::move(hospitals);
  s->travel.resize(static_cast<Eigen::Index>(s->patients.size()), static_cast<Eigen::Index>(s->hospitals.size()));
  for (Eigen::Index i = 0; i < s->travel.rows(); ++i)
    for (Eigen::Index j = 0; j < s->travel.cols(); ++j) s->travel(i, j) = travel[static_cast<std::size_t>(j)];
  s->reveal = {saturated(), saturated(), saturated()};
  s->fleet_size_max = fleet;
  s->horizon = horizon;
  return s;
}

/// Random small scenario: up to `max_patients` patients, up to `max_hospitals`
/// hospitals with scarce capacity, everything revealed at t = 0.
inline std::shared_ptr<const Scenario> random_small_scenario(Rng& rng, int max_patients = 6, int max_hospitals = 4) {
  const int np = static_cast<int>(rng.uniform_int(1, max_patients));
  const int nh = static_cast<int>(rng.uniform_int(1, max_hospitals));
  std::vector<Patient> ps;
  for (int i = 0; i < np; ++i) {
    const auto sev = static_cast<Severity>(rng.uniform_int(1, 3));
    ResourceVector req = ResourceVector::Zero();
    for (int k = 0; k < kResourceKinds; ++k) req[k] = rng.bernoulli(0.35) ? 1 : 0;
    const double window = sev == Severity::Critical ? static_cast<double>(rng.uniform_int(20, 90))
                          : sev == Severity::Severe ? static_cast<double>(rng.uniform_int(60, 240))
                                                    : kUnbounded;
    ps.push_back(patient(i + 1, sev, req, window, static_cast<int>(rng.uniform_int(0, 3))));
  }
  std::vector<Hospital> hs;
  std::vector<double> travel;
  for (int j = 0; j < nh; ++j) {
    ResourceVector caps = ResourceVector::Zero();
    for (int k = 0; k < kResourceKinds; ++k) caps[k] = static_cast<int>(rng.uniform_int(0, 2));
    hs.push_back(hospital(j + 1, static_cast<int>(rng.uniform_int(1, 3)), caps));
    travel.push_back(static_cast<double>(rng.uniform_int(5, 60)));
  }
  return make_scenario(std::move(ps), std::move(hs), std::move(travel), static_cast<int>(rng.uniform_int(1, 4)), 240);
}

/// Random mid-episode state: a few random assignments and ticks on a random
/// small scenario. Always leaves the state non-terminal when possible.
inline SimState random_state(Rng& rng, int max_patients = 6, int max_hospitals = 4) {
  SimState s = init_session(random_small_scenario(rng, max_patients, max_hospitals));
  const int ticks = static_cast<int>(rng.uniform_int(0, 12));
  for (int t = 0; t < ticks && !s.terminal; ++t) {
    for (const auto& p : s.patients)
      if (p.status == PatientStatus::Unassigned && rng.bernoulli(0.2)) {
        const auto h = rng.uniform_int(0, static_cast<std::int64_t>(s.hospitals.size()) - 1);
        assign_patient(s, p.id, s.scenario->hospitals[static_cast<std::size_t>(h)].id);
      }
    SimState next = s;
    step(next, 1);
    if (next.terminal) break;
    s = std::move(next);
  }
  return s;
}

}  // namespace mci::test
