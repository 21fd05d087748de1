// Myopic suggestion: the hospital with the best projected outcome for one
// patient if the ambulance left now.
#pragma once

#include "mci/engine.hpp"
#include "mci/reward.hpp"

#include <optional>

namespace mci {

struct Projection {
  double reward = 0.0;
  double pt = 0.0;
  double pq = 0.0;
  int travel = 0;
  int q = 0;
  int Q = 0;
  RewardCase reward_case = RewardCase::Minor;
};

/// Outcome of sending patient index p to hospital index h at the current
/// clock: the arrival reward, or the post-assignment expiry value when the
/// survival window would lapse before arrival. Capacity is taken from
/// `unreserved` (defaults to the hospital's current unreserved vector).
Projection project_assignment(const SimState& state, std::size_t p, std::size_t h);
Projection project_assignment(const SimState& state, std::size_t p, std::size_t h, const ResourceVector& unreserved);

/// Value of leaving a patient unassigned: the death penalty for severe and
/// critical patients, 0 for minor ones.
double leave_unassigned_value(Severity severity);

struct Suggestion {
  int patient_id = 0;
  int hospital_id = 0;
  Projection projection;
};

/// Best admissible hospital, ties broken by shorter travel then lower id.
/// None when nothing is admissible or nothing beats leaving the patient.
/// Throws Error(NotFound) for unknown ids and Error(InvalidArgument) when the
/// patient is not Unassigned.
std::optional<Suggestion> greedy_suggest(const SimState& state, int patient_id);

}  // namespace mci
