#include "mci/observation.hpp"
#include "mci/error.hpp"

#include <algorithm>
#include <cmath>

namespace mci {

ObservationCaps caps_for(const Scenario& s) {
  return {static_cast<int>(s.patients.size()), static_cast<int>(s.hospitals.size())};
}

EncodedObservation encode(const SimState& state, const ObservationCaps& caps) {
  const Scenario& sc = *state.scenario;
  const auto np = static_cast<int>(state.patients.size());
  const auto nh = static_cast<int>(state.hospitals.size());
  if (np > caps.max_patients || nh > caps.max_hospitals)
    throw Error(ErrorCode::Capacity, "roster " + std::to_string(np) + "x" + std::to_string(nh) +
                                         " exceeds observation caps " + std::to_string(caps.max_patients) + "x" +
                                         std::to_string(caps.max_hospitals));

  EncodedObservation out;
  out.features = Eigen::VectorXd::Zero(observation_size(caps));
  out.mask = ActionMask::Constant(caps.max_patients, caps.max_hospitals, false);

  for (int i = 0; i < np; ++i) {
    const PatientState& p = state.patients[static_cast<std::size_t>(i)];
    if (p.status != PatientStatus::Unassigned) continue;
    auto slot = out.features.segment(i * kPatientFeatures, kPatientFeatures);
    slot[0] = 1.0;
    slot[static_cast<int>(p.severity)] = 1.0;  // minor=1, severe=2, critical=3
    for (int k = 0; k < kResourceKinds; ++k) slot[4 + k] = p.requirements[k];
    const double elapsed = state.clock - p.entry_time;
    slot[12] = std::isinf(p.survival_window) ? 0.0 : std::clamp(elapsed / p.survival_window, 0.0, 1.0);
  }

  const int base = caps.max_patients * kPatientFeatures;
  for (int j = 0; j < nh; ++j) {
    const HospitalState& h = state.hospitals[static_cast<std::size_t>(j)];
    auto slot = out.features.segment(base + j * kHospitalFeatures, kHospitalFeatures);
    slot[0] = 1.0;
    slot[sc.hospitals[static_cast<std::size_t>(j)].level] = 1.0;
    const ResourceVector free = h.unreserved();
    for (int k = 0; k < kResourceKinds; ++k) slot[4 + k] = std::min(free[k], 10) / 10.0;
    slot[12] = np > 0 ? sc.travel.col(j).mean() / 60.0 : 0.0;
  }

  const int g = base + caps.max_hospitals * kHospitalFeatures;
  out.features[g] = static_cast<double>(state.clock) / std::max(1, sc.horizon);
  out.features[g + 1] = static_cast<double>(state.ambulances_available) / std::max(1, sc.fleet_size_max);

  for (int i = 0; i < np; ++i)
    for (int j = 0; j < nh; ++j)
      out.mask(i, j) = !check_assignment(state, static_cast<std::size_t>(i), static_cast<std::size_t>(j)).has_value();
  return out;
}

}  // namespace mci
