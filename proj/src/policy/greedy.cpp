#include "mci/greedy.hpp"
#include "mci/error.hpp"

#include <algorithm>
#include <string>

namespace mci {

Projection project_assignment(const SimState& s, std::size_t p, std::size_t h) {
  return project_assignment(s, p, h, s.hospitals[h].unreserved());
}

Projection project_assignment(const SimState& s, std::size_t p, std::size_t h, const ResourceVector& unreserved) {
  const PatientState& patient = s.patients[p];
  const int level = s.scenario->hospitals[h].level;
  Projection out;
  out.travel = travel_minutes(s, p, h);
  const MatchResult m = resource_match_count(patient.requirements, unreserved);
  out.q = m.q;
  out.Q = required_count(patient.requirements);

  const int arrival = s.clock + out.travel;
  const int elapsed_at_arrival = arrival - patient.entry_time;
  // Admission happens at the first tick >= arrival, before that tick's death check.
  const int admit_tick = std::max(arrival, s.clock + 1);
  const bool mortal = patient.severity == Severity::Critical || patient.severity == Severity::Severe;
  if (mortal && (admit_tick - 1 - patient.entry_time) > patient.survival_window) {
    out.reward_case = RewardCase::ExpiredPostAssignment;
    out.reward = patient_reward(out.reward_case, patient.severity, level, 0.0, 0.0);
    return out;
  }
  out.reward_case = arrival_case(patient.severity);
  out.pt = time_penalty(elapsed_at_arrival, patient.survival_window);
  out.pq = resource_penalty(out.q, out.Q);
  out.reward = patient_reward(out.reward_case, patient.severity, level, out.pt, out.pq);
  return out;
}

double leave_unassigned_value(Severity severity) {
  if (severity == Severity::Critical || severity == Severity::Severe)
    return patient_reward(RewardCase::NewlyDeceased, severity, std::nullopt, 0.0, 0.0);
  return 0.0;
}

std::optional<Suggestion> greedy_suggest(const SimState& s, int patient_id) {
  const auto idx = s.scenario->patient_index(patient_id);
  if (!idx) throw Error(ErrorCode::NotFound, "unknown patient " + std::to_string(patient_id));
  const PatientState& patient = s.patients[*idx];
  if (patient.status != PatientStatus::Unassigned)
    throw Error(ErrorCode::InvalidArgument, "patient " + std::to_string(patient_id) + " is not unassigned");

  std::optional<Suggestion> best;
  double best_travel = 0.0;
  for (std::size_t h = 0; h < s.hospitals.size(); ++h) {
    if (check_assignment(s, *idx, h)) continue;
    Suggestion cand{patient_id, s.scenario->hospitals[h].id, project_assignment(s, *idx, h)};
    const double travel = s.scenario->travel(static_cast<Eigen::Index>(*idx), static_cast<Eigen::Index>(h));
    const bool better = !best || cand.projection.reward > best->projection.reward ||
                        (cand.projection.reward == best->projection.reward &&
                         (travel < best_travel || (travel == best_travel && cand.hospital_id < best->hospital_id)));
    if (better) {
      best = cand;
      best_travel = travel;
    }
  }
  if (best && !(best->projection.reward > leave_unassigned_value(patient.severity))) return std::nullopt;
  return best;
}

}  // namespace mci
