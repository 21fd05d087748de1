// Exhaustive joint assignment over a small patient subset. Serves as the
// reference optimum for the myopic projected-reward objective.
#pragma once

#include "mci/engine.hpp"

#include <optional>
#include <span>
#include <vector>

namespace mci {

inline constexpr std::size_t kBruteForceMaxPatients = 6;
inline constexpr std::size_t kBruteForceMaxHospitals = 4;

struct JointChoice {
  int patient_id = 0;
  std::optional<int> hospital_id;  // none = leave unassigned this tick
};

struct JointAssignment {
  std::vector<JointChoice> choices;  // in the order of the requested patients
  double value = 0.0;
};

/// Enumerates every feasible joint plan (each patient either left or sent to
/// one admissible hospital, capacity and ambulances consumed in patient
/// order). Per patient, options are ordered: leave, then hospitals by
/// (travel, id); ties between plans go to the lexicographically smallest
/// option vector. Throws Error(Size) beyond 6 patients or 4 hospitals,
/// Error(NotFound) for unknown ids, Error(InvalidArgument) for patients that
/// are not Unassigned.
JointAssignment brute_force_joint(const SimState& state, std::span<const int> patient_ids);

}  // namespace mci
