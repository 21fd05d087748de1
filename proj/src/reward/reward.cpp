#include "mci/reward.hpp"
#include "mci/engine.hpp"
#include "mci/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mci {

std::string_view to_string(RewardCase c) {
  switch (c) {
    case RewardCase::NewlyDeceased: return "NewlyDeceased";
    case RewardCase::Critical: return "Critical";
    case RewardCase::Severe: return "Severe";
    case RewardCase::Minor: return "Minor";
    case RewardCase::ExpiredPostAssignment: return "ExpiredPostAssignment";
  }
  return "?";
}

std::optional<RewardCase> reward_case_from_string(std::string_view name) {
  for (auto c : {RewardCase::NewlyDeceased, RewardCase::Critical, RewardCase::Severe, RewardCase::Minor,
                 RewardCase::ExpiredPostAssignment})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

double time_penalty(double elapsed, double survival_window) {
  if (!(survival_window > 0.0)) throw Error(ErrorCode::Domain, "time_penalty: survival window must be > 0");
  if (!(elapsed >= 0.0)) throw Error(ErrorCode::Domain, "time_penalty: elapsed time must be >= 0");
  if (std::isinf(survival_window)) return 1.0;
  return std::max(0.0, 1.0 - elapsed / survival_window);
}

double resource_penalty(int q, int Q) {
  if (q < 0 || q > Q) throw Error(ErrorCode::Domain, "resource_penalty: require 0 <= q <= Q");
  if (Q == 0) return 1.0;
  return static_cast<double>(q) / static_cast<double>(Q);
}

RewardCase arrival_case(Severity severity) {
  switch (severity) {
    case Severity::Critical: return RewardCase::Critical;
    case Severity::Severe: return RewardCase::Severe;
    case Severity::Minor: return RewardCase::Minor;
    case Severity::Deceased: break;
  }
  throw Error(ErrorCode::Domain, "deceased patients cannot arrive");
}

double patient_reward(RewardCase c, Severity severity, std::optional<int> level, double pt, double pq) {
  if (c == RewardCase::NewlyDeceased) {
    if (level) throw Error(ErrorCode::Domain, "NewlyDeceased takes no hospital level");
    if (severity == Severity::Critical) return -600.0;
    if (severity == Severity::Severe) return -400.0;
    throw Error(ErrorCode::Domain, "NewlyDeceased requires a severe or critical patient");
  }
  if (!level || *level < 1 || *level > 3) throw Error(ErrorCode::Domain, "hospital level must be 1, 2 or 3");
  const int h = *level - 1;
  if (c == RewardCase::ExpiredPostAssignment) {
    if (severity != Severity::Critical && severity != Severity::Severe)
      throw Error(ErrorCode::Domain, "ExpiredPostAssignment requires a severe or critical patient");
    static constexpr double kExpired[3] = {-300.0, -200.0, -100.0};
    return kExpired[h];
  }
  if (!(pt >= 0.0 && pt <= 1.0) || !(pq >= 0.0 && pq <= 1.0))
    throw Error(ErrorCode::Domain, "PT and PQ must lie in [0, 1]");
  if (arrival_case(severity) != c) throw Error(ErrorCode::Domain, "reward case does not match patient severity");

  // {PQ weight, PT weight at level 1, 2, 3}
  static constexpr double kCritical[4] = {300.0, 300.0, 150.0, 0.0};
  static constexpr double kSevere[4] = {200.0, 200.0, 200.0, 100.0};
  static constexpr double kMinor[4] = {100.0, 0.0, 50.0, 100.0};
  const double* w = c == RewardCase::Critical ? kCritical : c == RewardCase::Severe ? kSevere : kMinor;
  return w[0] * pq + w[1 + h] * pt;
}

RewardBreakdown transition_reward(const SimState& pre, const SimState& post, const std::vector<Event>& events) {
  return transition_reward(pre.patients, post, events);
}

RewardBreakdown transition_reward(const std::vector<PatientState>& pre_patients, const SimState& post,
                                  const std::vector<Event>& events) {
  RewardBreakdown out;
  const Scenario& sc = *post.scenario;
  for (const auto& e : events) {
    if (e.kind != EventKind::Arrived && e.kind != EventKind::Died) continue;
    const auto idx = sc.patient_index(*e.patient_id);
    if (!idx) continue;
    const PatientState& now = post.patients[*idx];
    const PatientState& before = pre_patients[*idx];
    PatientReward r;
    r.patient_id = now.id;
    if (e.kind == EventKind::Arrived) {
      const int level = sc.hospitals[static_cast<std::size_t>(now.hospital)].level;
      r.reward_case = arrival_case(now.severity);
      r.pt = time_penalty(now.arrival_time - now.entry_time, now.survival_window);
      r.pq = resource_penalty(now.q, required_count(now.requirements));
      r.reward = patient_reward(r.reward_case, now.severity, level, r.pt, r.pq);
    } else {
      const bool en_route = before.status == PatientStatus::Assigned || before.status == PatientStatus::InTransit;
      if (en_route) {
        const int level = sc.hospitals[static_cast<std::size_t>(before.hospital)].level;
        r.reward_case = RewardCase::ExpiredPostAssignment;
        r.reward = patient_reward(r.reward_case, now.severity, level, 0.0, 0.0);
      } else {
        r.reward_case = RewardCase::NewlyDeceased;
        r.reward = patient_reward(r.reward_case, now.severity, std::nullopt, 0.0, 0.0);
      }
    }
    out.total += r.reward;
    out.per_patient.push_back(r);
  }
  return out;
}

nlohmann::json breakdown_to_json(const RewardBreakdown& b) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : b.per_patient)
    rows.push_back(
        {{"patient_id", r.patient_id}, {"reward", r.reward}, {"pt", r.pt}, {"pq", r.pq}, {"case", to_string(r.reward_case)}});
  return {{"per_patient", rows}, {"total", b.total}};
}

}  // namespace mci
