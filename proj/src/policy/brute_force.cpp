#include "mci/brute_force.hpp"
#include "mci/error.hpp"
#include "mci/reward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mci {

namespace {

constexpr int kEmergency = index_of(ResourceKind::Emergency);

// Written out directly from the reward table rather than reusing the greedy
// projection, so the two routes stay independent.
double outcome_value(const SimState& s, std::size_t p, std::size_t h, const ResourceVector& free) {
  const PatientState& pt = s.patients[p];
  const int level = s.scenario->hospitals[h].level;
  const double minutes = std::ceil(s.scenario->travel(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(h)));
  const double arrive = s.clock + minutes;
  const bool mortal = pt.severity == Severity::Critical || pt.severity == Severity::Severe;
  // The patient is alive at every tick before admission iff (admit - 1) - entry <= T.
  const double admit = std::max(arrive, static_cast<double>(s.clock + 1));
  if (mortal && admit - 1.0 - pt.entry_time > pt.survival_window)
    return patient_reward(RewardCase::ExpiredPostAssignment, pt.severity, level, 0.0, 0.0);

  int q = 0;
  int Q = 0;
  for (int k = 0; k < kResourceKinds; ++k) {
    if (pt.requirements[k] == 0) continue;
    ++Q;
    if (free[k] > 0) ++q;
  }
  const double pq = resource_penalty(q, Q);
  const double ptime = time_penalty(arrive - pt.entry_time, pt.survival_window);
  return patient_reward(arrival_case(pt.severity), pt.severity, level, ptime, pq);
}

double left_value(Severity s) {
  if (s == Severity::Critical) return patient_reward(RewardCase::NewlyDeceased, s, std::nullopt, 0, 0);
  if (s == Severity::Severe) return patient_reward(RewardCase::NewlyDeceased, s, std::nullopt, 0, 0);
  return 0.0;
}

}  // namespace

JointAssignment brute_force_joint(const SimState& s, std::span<const int> patient_ids) {
  if (patient_ids.size() > kBruteForceMaxPatients || s.hospitals.size() > kBruteForceMaxHospitals)
    throw Error(ErrorCode::Size, "brute_force_joint supports at most 6 patients and 4 hospitals");

  std::vector<std::size_t> rows;
  for (int id : patient_ids) {
    const auto idx = s.scenario->patient_index(id);
    if (!idx) throw Error(ErrorCode::NotFound, "unknown patient " + std::to_string(id));
    if (s.patients[*idx].status != PatientStatus::Unassigned)
      throw Error(ErrorCode::InvalidArgument, "patient " + std::to_string(id) + " is not unassigned");
    rows.push_back(*idx);
  }

  // Per-patient option lists: 0 = leave, 1.. = hospitals by (travel, id).
  std::vector<std::vector<std::size_t>> hospital_order(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& order = hospital_order[i];
    order.resize(s.hospitals.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double ta = s.scenario->travel(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(a));
      const double tb = s.scenario->travel(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(b));
      if (ta != tb) return ta < tb;
      return s.scenario->hospitals[a].id < s.scenario->hospitals[b].id;
    });
  }

  const std::size_t options = s.hospitals.size() + 1;
  std::vector<std::size_t> digits(rows.size(), 0);
  std::vector<std::size_t> best_digits;
  double best_value = 0.0;
  bool have_best = false;

  for (;;) {
    // Evaluate the plan encoded by `digits`.
    std::vector<ResourceVector> free;
    for (const auto& h : s.hospitals) free.push_back(h.effective - h.reserved);
    int ambulances = s.terminal ? 0 : s.ambulances_available;
    double value = 0.0;
    bool feasible = true;
    for (std::size_t i = 0; i < rows.size() && feasible; ++i) {
      const PatientState& pt = s.patients[rows[i]];
      if (digits[i] == 0) {
        value += left_value(pt.severity);
        continue;
      }
      const std::size_t h = hospital_order[i][digits[i] - 1];
      if (free[h][kEmergency] < 1 || ambulances < 1) {
        feasible = false;
        break;
      }
      value += outcome_value(s, rows[i], h, free[h]);
      for (int k = 0; k < kResourceKinds; ++k)
        if (pt.requirements[k] == 1 && free[h][k] > 0) free[h][k] -= 1;
      if (pt.requirements[kEmergency] == 0) free[h][kEmergency] -= 1;
      ambulances -= 1;
    }
    if (feasible && (!have_best || value > best_value)) {
      best_value = value;
      best_digits = digits;
      have_best = true;
    }

    std::size_t pos = rows.size();
    while (pos > 0) {
      --pos;
      if (++digits[pos] < options) break;
      digits[pos] = 0;
      if (pos == 0) {
        pos = rows.size() + 1;
        break;
      }
    }
    if (rows.empty() || pos == rows.size() + 1) break;
  }

  JointAssignment out;
  out.value = best_value;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    JointChoice c;
    c.patient_id = s.patients[rows[i]].id;
    if (best_digits[i] > 0) c.hospital_id = s.scenario->hospitals[hospital_order[i][best_digits[i] - 1]].id;
    out.choices.push_back(c);
  }
  return out;
}

}  // namespace mci
