#include "mci/core.hpp"
#include "mci/error.hpp"

#include <cmath>
#include <set>

namespace mci {

std::optional<std::size_t> Scenario::patient_index(int patient_id) const {
  for (std::size_t i = 0; i < patients.size(); ++i)
    if (patients[i].id == patient_id) return i;
  return std::nullopt;
}

std::optional<std::size_t> Scenario::hospital_index(int hospital_id) const {
  for (std::size_t j = 0; j < hospitals.size(); ++j)
    if (hospitals[j].id == hospital_id) return j;
  return std::nullopt;
}

namespace {

void check_sigmoid(const SigmoidParams& p, const std::string& name, std::vector<Violation>& out) {
  if (!(p.steepness > 0.0)) out.push_back({name, "steepness must be > 0"});
  if (!(p.floor >= 0.0 && p.floor < p.ceiling && p.ceiling <= 1.0))
    out.push_back({name, "require 0 <= floor < ceiling <= 1"});
  if (!std::isfinite(p.midpoint)) out.push_back({name, "midpoint must be finite"});
}

}  // namespace

std::vector<Violation> validate_scenario(const Scenario& s) {
  std::vector<Violation> out;
  if (s.patients.empty()) out.push_back({"patients", "scenario has no patients"});
  if (s.hospitals.empty()) out.push_back({"hospitals", "scenario has no hospitals"});
  if (s.horizon <= 0) out.push_back({"horizon_min", "horizon must be > 0"});
  if (s.fleet_size_max < 0) out.push_back({"fleet", "fleet size must be >= 0"});

  std::set<int> ids;
  for (std::size_t i = 0; i < s.patients.size(); ++i) {
    const auto& p = s.patients[i];
    const std::string name = "patients[" + std::to_string(i) + "] (id " + std::to_string(p.id) + ")";
    if (!ids.insert(p.id).second) out.push_back({name, "duplicate patient id"});
    if (p.severity == Severity::Deceased)
      out.push_back({name, "dead-on-scene patients are not simulated"});
    if ((p.requirements.array() < 0).any() || (p.requirements.array() > 1).any())
      out.push_back({name, "requirement vector must be binary"});
    if ((p.severity == Severity::Critical || p.severity == Severity::Severe) &&
        !(p.survival_window > 0.0 && std::isfinite(p.survival_window)))
      out.push_back({name, "survival window must be a finite positive duration"});
    if (p.severity == Severity::Minor && !(p.survival_window > 0.0))
      out.push_back({name, "survival window must be positive"});
    if (p.reveal_time < 0) out.push_back({name, "reveal time must be >= 0"});
  }

  ids.clear();
  for (std::size_t j = 0; j < s.hospitals.size(); ++j) {
    const auto& h = s.hospitals[j];
    const std::string name = "hospitals[" + std::to_string(j) + "] (id " + std::to_string(h.id) + ")";
    if (!ids.insert(h.id).second) out.push_back({name, "duplicate hospital id"});
    if (h.level < 1 || h.level > 3) out.push_back({name, "level must be 1, 2 or 3"});
    if ((h.capacities.array() < 0).any()) out.push_back({name, "capacities must be >= 0"});
  }

  if (s.travel.rows() != static_cast<Eigen::Index>(s.patients.size()) ||
      s.travel.cols() != static_cast<Eigen::Index>(s.hospitals.size())) {
    out.push_back({"travel_matrix", "dimensions " + std::to_string(s.travel.rows()) + "x" +
                                        std::to_string(s.travel.cols()) + " do not match " +
                                        std::to_string(s.patients.size()) + " patients x " +
                                        std::to_string(s.hospitals.size()) + " hospitals"});
  } else if (s.travel.size() > 0 && (!s.travel.allFinite() || (s.travel.array() < 0.0).any())) {
    out.push_back({"travel_matrix", "durations must be finite and >= 0"});
  }

  check_sigmoid(s.reveal.patients, "reveal_params.patients", out);
  check_sigmoid(s.reveal.ambulances, "reveal_params.ambulances", out);
  check_sigmoid(s.reveal.capacity, "reveal_params.capacity", out);
  return out;
}

MatchResult resource_match_count(const ResourceVector& required, const ResourceVector& available) {
  MatchResult r;
  r.matched = ((required.array() > 0) && (available.array() >= 1)).cast<int>().matrix();
  r.q = r.matched.sum();
  return r;
}

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::Deceased: return "deceased";
    case Severity::Minor: return "minor";
    case Severity::Severe: return "severe";
    case Severity::Critical: return "critical";
  }
  return "?";
}

std::string_view to_string(PatientStatus s) {
  switch (s) {
    case PatientStatus::Hidden: return "hidden";
    case PatientStatus::Unassigned: return "unassigned";
    case PatientStatus::Assigned: return "assigned";
    case PatientStatus::InTransit: return "in_transit";
    case PatientStatus::Admitted: return "admitted";
    case PatientStatus::Deceased: return "deceased";
  }
  return "?";
}

std::optional<Severity> severity_from_int(int v) {
  if (v < 0 || v > 3) return std::nullopt;
  return static_cast<Severity>(v);
}

std::string_view severity_color(Severity s) {
  switch (s) {
    case Severity::Critical: return "red";
    case Severity::Severe: return "yellow";
    case Severity::Minor: return "green";
    case Severity::Deceased: return "gray";
  }
  return "gray";
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Config: return "config_error";
    case ErrorCode::Validation: return "validation_error";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::Domain: return "domain_error";
    case ErrorCode::ModeViolation: return "mode_violation";
    case ErrorCode::Capacity: return "capacity_error";
    case ErrorCode::Size: return "size_error";
    case ErrorCode::PolicyLoad: return "policy_load_error";
    case ErrorCode::MalformedLog: return "malformed_log";
    case ErrorCode::Storage: return "storage_error";
    case ErrorCode::Generation: return "generation_error";
    case ErrorCode::Divergence: return "divergence";
  }
  return "error";
}

}  // namespace mci
