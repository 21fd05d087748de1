// Outcome measures computed from an event log: completion time, mortality
// rate and resource match rate.
#pragma once

#include "mci/event.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mci {

struct PatientOutcome {
  int patient_id = 0;
  std::string outcome;  // admitted / deceased / unresolved
  std::optional<int> hospital_id;
  int matched = 0;
  int required = 0;
  std::optional<int> elapsed;  // entry -> arrival, admitted patients only

  bool operator==(const PatientOutcome&) const = default;
};

struct OutcomeReport {
  double completion_time = 0.0;  // minutes for headless runs; seconds when wall-clock supplied
  double mortality_rate = 0.0;   // percent
  double match_rate = 0.0;       // percent
  int deaths = 0;
  int total_patients = 0;
  int admitted = 0;
  std::vector<PatientOutcome> patients;

  bool operator==(const OutcomeReport&) const = default;
};

/// Last Assigned time (or SessionEnded when nothing was assigned) minus the
/// SessionStarted time. Throws Error(MalformedLog) without those markers.
double completion_time(const std::vector<Event>& log);

/// deaths / total x 100; total comes from SessionStarted.
double mortality_rate(const std::vector<Event>& log);

/// Mean over admitted patients of matched / required x 100. A patient with no
/// requirements counts as fully matched; with nobody admitted the rate is 0.
double match_rate(const std::vector<Event>& log);

OutcomeReport outcome_report(const std::vector<Event>& log);

nlohmann::json report_to_json(const OutcomeReport& r);
OutcomeReport report_from_json(const nlohmann::json& j);

/// Two sections: a `metric,value` block and a per-patient table.
std::string report_to_csv(const OutcomeReport& r);

}  // namespace mci
