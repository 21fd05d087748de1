// Fixed-size numeric view of a simulation state plus the action mask.
//
// Patient slot (13): active bit, severity one-hot {minor, severe, critical},
// 8 requirement bits, elapsed / survival window clipped to [0, 1].
// Hospital slot (13): present bit, level one-hot, 8 unreserved capacities
// (clipped at 10, scaled to [0, 1]), travel minutes / 60.
// Global (2): clock / horizon, available ambulances / fleet maximum.
// A patient slot is active only while that patient is Unassigned; inactive
// and unused slots are all zero.
#pragma once

#include "mci/engine.hpp"

#include <Eigen/Core>

namespace mci {

struct ObservationCaps {
  int max_patients = 64;
  int max_hospitals = 8;
  bool operator==(const ObservationCaps&) const = default;
};

inline constexpr int kPatientFeatures = 13;
inline constexpr int kHospitalFeatures = 13;
inline constexpr int kGlobalFeatures = 2;

inline int observation_size(const ObservationCaps& c) {
  return c.max_patients * kPatientFeatures + c.max_hospitals * kHospitalFeatures + kGlobalFeatures;
}

/// Flattened (patient-slot, hospital-slot) pairs plus a trailing wait action.
inline int action_count(const ObservationCaps& c) { return c.max_patients * c.max_hospitals + 1; }

/// (patient slot x hospital slot); true iff assign_patient would accept.
using ActionMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct EncodedObservation {
  Eigen::VectorXd features;
  ActionMask mask;

  bool any_action() const { return mask.any(); }
};

/// Throws Error(Capacity) when the roster exceeds the caps.
EncodedObservation encode(const SimState& state, const ObservationCaps& caps);

/// Caps that exactly fit a scenario's roster.
ObservationCaps caps_for(const Scenario& scenario);

}  // namespace mci
