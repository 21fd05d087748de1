// Multi-objective per-patient reward: time penalty PT, resource-matching
// penalty PQ and the severity/hospital-level case table.
#pragma once

#include "mci/core.hpp"
#include "mci/event.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace mci {

struct SimState;

enum class RewardCase { NewlyDeceased, Critical, Severe, Minor, ExpiredPostAssignment };

std::string_view to_string(RewardCase c);
std::optional<RewardCase> reward_case_from_string(std::string_view name);

/// PT = max(0, 1 - t / T). Throws Error(Domain) when T <= 0 or t < 0.
double time_penalty(double elapsed, double survival_window);

/// PQ = q / Q, and 1 when Q = 0. Throws Error(Domain) unless 0 <= q <= Q.
double resource_penalty(int q, int Q);

/// Case table. `level` must be empty for NewlyDeceased and in {1,2,3}
/// otherwise; severity must agree with the case. Throws Error(Domain).
double patient_reward(RewardCase c, Severity severity, std::optional<int> level, double pt, double pq);

/// Severity-cased arrival case for a live patient.
RewardCase arrival_case(Severity severity);

struct PatientReward {
  int patient_id = 0;
  double reward = 0.0;
  double pt = 0.0;
  double pq = 0.0;
  RewardCase reward_case = RewardCase::Minor;
};

struct RewardBreakdown {
  std::vector<PatientReward> per_patient;
  double total = 0.0;
};

/// Reward earned between two states: arrivals score their severity case
/// with t = arrival - entry; deaths score NewlyDeceased when the patient was
/// not on its way to a hospital in `pre`, ExpiredPostAssignment otherwise.
RewardBreakdown transition_reward(const SimState& pre, const SimState& post, const std::vector<Event>& events);

struct PatientState;
/// Same, taking only the pre-transition patient roster.
RewardBreakdown transition_reward(const std::vector<PatientState>& pre_patients, const SimState& post,
                                  const std::vector<Event>& events);

nlohmann::json breakdown_to_json(const RewardBreakdown& b);

}  // namespace mci
