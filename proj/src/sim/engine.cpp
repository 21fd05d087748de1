#include "mci/engine.hpp"
#include "mci/error.hpp"
#include "mci/reward.hpp"
#include "mci/scenario_io.hpp"
#include "mci/sigmoid.hpp"

#include <algorithm>
#include <cmath>

namespace mci {

using nlohmann::json;

std::string_view to_string(AssignSource s) {
  return s == AssignSource::Manual ? "Manual" : "SuggestionAccepted";
}

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::NotFound: return "NotFound";
    case RejectReason::InvalidStatus: return "InvalidStatus";
    case RejectReason::NoEmergencyCapacity: return "NoEmergencyCapacity";
    case RejectReason::NoAmbulance: return "NoAmbulance";
    case RejectReason::AlreadyDeparted: return "AlreadyDeparted";
    case RejectReason::Terminal: return "Terminal";
  }
  return "?";
}

bool same_state(const SimState& a, const SimState& b) {
  const bool same_scenario = a.scenario == b.scenario || (a.scenario && b.scenario && a.scenario->id == b.scenario->id);
  return same_scenario && a.clock == b.clock && a.patients == b.patients && a.hospitals == b.hospitals &&
         a.fleet_size == b.fleet_size && a.ambulances_available == b.ambulances_available &&
         a.ambulance_returns == b.ambulance_returns && a.terminal == b.terminal;
}

namespace {

constexpr int kEmergency = index_of(ResourceKind::Emergency);

const Event& emit(SimState& s, std::vector<Event>& out, EventKind kind, std::optional<int> patient,
                  std::optional<int> hospital, json payload, std::string color) {
  Event e;
  e.seq = static_cast<std::int64_t>(s.event_log.size());
  e.time = s.clock;
  e.kind = kind;
  e.patient_id = patient;
  e.hospital_id = hospital;
  e.payload = std::move(payload);
  e.color = std::move(color);
  s.event_log.push_back(e);
  out.push_back(std::move(e));
  return s.event_log.back();
}

std::string patient_color(const PatientState& p) {
  if (p.status == PatientStatus::Deceased) return "gray";
  return std::string(severity_color(p.severity));
}

void reveal_patients(SimState& s, std::vector<Event>& out) {
  for (auto& p : s.patients) {
    if (p.status != PatientStatus::Hidden || p.reveal_time > s.clock) continue;
    p.status = PatientStatus::Unassigned;
    p.entry_time = s.clock;
    emit(s, out, EventKind::PatientRevealed, p.id, std::nullopt,
         {{"severity", static_cast<int>(p.severity)}, {"requirements", resource_to_json(p.requirements)}},
         patient_color(p));
  }
}

void grow_resources(SimState& s, std::vector<Event>& out) {
  const Scenario& sc = *s.scenario;
  const int fleet = std::max(fleet_size_at(sc, s.clock), s.fleet_size);
  if (fleet > s.fleet_size) {
    const int added = fleet - s.fleet_size;
    s.fleet_size = fleet;
    s.ambulances_available += added;
    emit(s, out, EventKind::AmbulanceAvailable, std::nullopt, std::nullopt,
         {{"added", added}, {"returned", 0}, {"available", s.ambulances_available}, {"fleet", s.fleet_size}}, "blue");
  }
  for (std::size_t j = 0; j < s.hospitals.size(); ++j) {
    auto& h = s.hospitals[j];
    const ResourceVector grown =
        effective_capacity(sc.hospitals[j], sc.reveal.capacity, s.clock).cwiseMax(h.reserved).cwiseMax(h.effective);
    if (grown != h.effective) {
      h.effective = grown;
      emit(s, out, EventKind::CapacityChanged, std::nullopt, sc.hospitals[j].id,
           {{"capacities", resource_to_json(h.effective)}, {"unreserved", resource_to_json(h.unreserved())}}, "blue");
    }
  }
}

void admit_arrivals(SimState& s, std::vector<Event>& out) {
  const Scenario& sc = *s.scenario;
  for (auto& p : s.patients) {
    if (p.status != PatientStatus::InTransit || p.arrival_time > s.clock) continue;
    p.status = PatientStatus::Admitted;
    const auto& hosp = sc.hospitals[static_cast<std::size_t>(p.hospital)];
    const int elapsed = p.arrival_time - p.entry_time;
    const int Q = required_count(p.requirements);
    const double pt = time_penalty(elapsed, p.survival_window);
    const double pq = resource_penalty(p.q, Q);
    const double reward = patient_reward(arrival_case(p.severity), p.severity, hosp.level, pt, pq);
    emit(s, out, EventKind::Arrived, p.id, hosp.id,
         {{"elapsed", elapsed}, {"q", p.q}, {"Q", Q}, {"level", hosp.level}, {"pt", pt}, {"pq", pq}, {"reward", reward}},
         patient_color(p));
  }
}

void apply_deaths(SimState& s, std::vector<Event>& out) {
  const Scenario& sc = *s.scenario;
  for (auto& p : s.patients) {
    const bool mortal = p.severity == Severity::Critical || p.severity == Severity::Severe;
    const bool alive = p.status == PatientStatus::Unassigned || p.status == PatientStatus::Assigned ||
                       p.status == PatientStatus::InTransit;
    if (!mortal || !alive || !(s.clock - p.entry_time > p.survival_window)) continue;

    const PatientStatus prior = p.status;
    json payload = {{"prior_status", to_string(prior)}};
    std::optional<int> hospital_id;
    if (prior == PatientStatus::Unassigned) {
      payload["case"] = to_string(RewardCase::NewlyDeceased);
      payload["reward"] = patient_reward(RewardCase::NewlyDeceased, p.severity, std::nullopt, 0.0, 0.0);
    } else {
      const auto h = static_cast<std::size_t>(p.hospital);
      const int level = sc.hospitals[h].level;
      hospital_id = sc.hospitals[h].id;
      payload["case"] = to_string(RewardCase::ExpiredPostAssignment);
      payload["level"] = level;
      payload["reward"] = patient_reward(RewardCase::ExpiredPostAssignment, p.severity, level, 0.0, 0.0);
      payload["released"] = resource_to_json(p.reserved);
      s.hospitals[h].reserved -= p.reserved;
      p.reserved.setZero();
    }
    p.status = PatientStatus::Deceased;
    emit(s, out, EventKind::Died, p.id, hospital_id, std::move(payload), "gray");
  }
}

void return_ambulances(SimState& s, std::vector<Event>& out) {
  int returned = 0;
  while (!s.ambulance_returns.empty() && s.ambulance_returns.front() <= s.clock) {
    s.ambulance_returns.erase(s.ambulance_returns.begin());
    ++returned;
  }
  if (returned == 0) return;
  s.ambulances_available += returned;
  emit(s, out, EventKind::AmbulanceAvailable, std::nullopt, std::nullopt,
       {{"added", 0}, {"returned", returned}, {"available", s.ambulances_available}, {"fleet", s.fleet_size}}, "blue");
}

void check_terminal(SimState& s, std::vector<Event>& out) {
  const bool resolved = std::all_of(s.patients.begin(), s.patients.end(), [](const PatientState& p) {
    return p.status == PatientStatus::Admitted || p.status == PatientStatus::Deceased;
  });
  if (resolved || s.clock >= s.scenario->horizon) {
    s.terminal = true;
    emit(s, out, EventKind::SessionEnded, std::nullopt, std::nullopt, {{"reason", resolved ? "resolved" : "horizon"}},
         "blue");
  }
}

std::optional<std::size_t> find_patient(const SimState& s, int id) {
  for (std::size_t i = 0; i < s.patients.size(); ++i)
    if (s.patients[i].id == id) return i;
  return std::nullopt;
}

}  // namespace

SimState init_session(std::shared_ptr<const Scenario> scenario) {
  if (!scenario) throw Error(ErrorCode::InvalidArgument, "init_session: null scenario");
  const auto violations = validate_scenario(*scenario);
  if (!violations.empty()) {
    std::string msg = "scenario rejected:";
    for (const auto& v : violations) msg += " [" + v.subject + ": " + v.message + "]";
    throw Error(ErrorCode::Validation, msg);
  }
  SimState s;
  s.scenario = std::move(scenario);
  const Scenario& sc = *s.scenario;
  s.patients.reserve(sc.patients.size());
  for (const auto& p : sc.patients) {
    PatientState ps;
    ps.id = p.id;
    ps.severity = p.severity;
    ps.requirements = p.requirements;
    ps.survival_window = p.survival_window;
    ps.reveal_time = p.reveal_time;
    s.patients.push_back(ps);
  }
  s.hospitals.resize(sc.hospitals.size());
  for (std::size_t j = 0; j < sc.hospitals.size(); ++j)
    s.hospitals[j].effective = effective_capacity(sc.hospitals[j], sc.reveal.capacity, 0);
  s.fleet_size = fleet_size_at(sc, 0);
  s.ambulances_available = s.fleet_size;

  std::vector<Event> sink;
  json caps = json::array();
  for (std::size_t j = 0; j < sc.hospitals.size(); ++j)
    caps.push_back({{"hospital_id", sc.hospitals[j].id}, {"capacities", resource_to_json(s.hospitals[j].effective)}});
  emit(s, sink, EventKind::SessionStarted, std::nullopt, std::nullopt,
       {{"scenario_id", sc.id},
        {"patient_count", sc.patients.size()},
        {"hospital_count", sc.hospitals.size()},
        {"horizon", sc.horizon},
        {"fleet", s.fleet_size},
        {"capacities", caps}},
       "blue");
  reveal_patients(s, sink);
  return s;
}

SimState init_session(const Scenario& scenario) { return init_session(std::make_shared<const Scenario>(scenario)); }

std::vector<Event> step(SimState& s, int dt) {
  if (dt <= 0) throw Error(ErrorCode::InvalidArgument, "step: dt must be > 0");
  std::vector<Event> out;
  if (s.terminal) {
    Event w;
    w.seq = -1;
    w.time = s.clock;
    w.kind = EventKind::Warning;
    w.payload = {{"message", "step ignored: session is terminal"}};
    w.color = "blue";
    out.push_back(std::move(w));
    return out;
  }
  for (int i = 0; i < dt && !s.terminal; ++i) {
    s.clock += 1;
    reveal_patients(s, out);
    grow_resources(s, out);
    admit_arrivals(s, out);
    apply_deaths(s, out);
    return_ambulances(s, out);
    check_terminal(s, out);
  }
  return out;
}

int travel_minutes(const SimState& s, std::size_t p, std::size_t h) {
  return static_cast<int>(std::ceil(s.scenario->travel(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(h))));
}

std::optional<RejectReason> check_assignment(const SimState& s, std::size_t p, std::size_t h) {
  if (s.terminal) return RejectReason::Terminal;
  if (p >= s.patients.size() || h >= s.hospitals.size()) return RejectReason::NotFound;
  if (s.patients[p].status != PatientStatus::Unassigned) return RejectReason::InvalidStatus;
  if (s.hospitals[h].unreserved()[kEmergency] < 1) return RejectReason::NoEmergencyCapacity;
  if (s.ambulances_available < 1) return RejectReason::NoAmbulance;
  return std::nullopt;
}

ActionOutcome assign_patient(SimState& s, int patient_id, int hospital_id, AssignSource source) {
  ActionOutcome result;
  const auto p = find_patient(s, patient_id);
  const auto h = s.scenario->hospital_index(hospital_id);
  if (!p || !h) {
    result.rejection = Rejection{RejectReason::NotFound, !p ? "unknown patient " + std::to_string(patient_id)
                                                            : "unknown hospital " + std::to_string(hospital_id)};
    return result;
  }
  if (const auto reason = check_assignment(s, *p, *h)) {
    result.rejection = Rejection{*reason, std::string(to_string(*reason))};
    return result;
  }

  PatientState& patient = s.patients[*p];
  HospitalState& hospital = s.hospitals[*h];
  const Hospital& info = s.scenario->hospitals[*h];
  const MatchResult match = resource_match_count(patient.requirements, hospital.unreserved());
  ResourceVector reserve = match.matched;
  reserve[kEmergency] = 1;
  hospital.reserved += reserve;

  const int travel = travel_minutes(s, *p, *h);
  patient.hospital = static_cast<int>(*h);
  patient.reserved = reserve;
  patient.q = match.q;
  patient.departure_time = s.clock;
  patient.arrival_time = s.clock + travel;
  s.ambulances_available -= 1;
  const int back = patient.arrival_time + travel;
  s.ambulance_returns.insert(std::upper_bound(s.ambulance_returns.begin(), s.ambulance_returns.end(), back), back);

  patient.status = PatientStatus::Assigned;
  emit(s, result.events, EventKind::Assigned, patient.id, info.id,
       {{"source", to_string(source)},
        {"matched", resource_to_json(match.matched)},
        {"required", resource_to_json(patient.requirements)},
        {"reserved", resource_to_json(reserve)},
        {"q", match.q},
        {"Q", required_count(patient.requirements)},
        {"level", info.level},
        {"travel", travel}},
       patient_color(patient));
  patient.status = PatientStatus::InTransit;
  emit(s, result.events, EventKind::Departed, patient.id, info.id,
       {{"arrival_time", patient.arrival_time}, {"ambulance_return_time", back}}, patient_color(patient));
  return result;
}

ActionOutcome cancel_assignment(SimState& s, int patient_id) {
  ActionOutcome result;
  const auto p = find_patient(s, patient_id);
  if (!p) {
    result.rejection = Rejection{RejectReason::NotFound, "unknown patient " + std::to_string(patient_id)};
    return result;
  }
  PatientState& patient = s.patients[*p];
  if (patient.status != PatientStatus::Assigned && patient.status != PatientStatus::InTransit) {
    result.rejection = Rejection{RejectReason::InvalidStatus, "patient is not assigned"};
    return result;
  }
  if (patient.departure_time != s.clock) {
    result.rejection = Rejection{RejectReason::AlreadyDeparted, "assignment can only be undone in its own tick"};
    return result;
  }
  const auto h = static_cast<std::size_t>(patient.hospital);
  const int back = patient.arrival_time + travel_minutes(s, *p, h);
  const auto it = std::lower_bound(s.ambulance_returns.begin(), s.ambulance_returns.end(), back);
  if (it != s.ambulance_returns.end() && *it == back) s.ambulance_returns.erase(it);
  s.ambulances_available += 1;
  s.hospitals[h].reserved -= patient.reserved;

  const json payload = {{"released", resource_to_json(patient.reserved)}};
  patient.status = PatientStatus::Unassigned;
  patient.hospital = -1;
  patient.departure_time = -1;
  patient.arrival_time = -1;
  patient.reserved.setZero();
  patient.q = 0;
  emit(s, result.events, EventKind::AssignmentCancelled, patient.id, s.scenario->hospitals[h].id, payload,
       patient_color(patient));
  return result;
}

Event record_event(SimState& s, EventKind kind, std::optional<int> patient_id, std::optional<int> hospital_id,
                   json payload) {
  std::vector<Event> sink;
  std::string color = "blue";
  if (patient_id)
    if (const auto p = find_patient(s, *patient_id)) color = patient_color(s.patients[*p]);
  return emit(s, sink, kind, patient_id, hospital_id, std::move(payload), std::move(color));
}

std::vector<Event> end_session(SimState& s, std::string_view reason) {
  std::vector<Event> out;
  if (s.terminal) return out;
  s.terminal = true;
  emit(s, out, EventKind::SessionEnded, std::nullopt, std::nullopt, {{"reason", reason}}, "blue");
  return out;
}

StatusCounts status_counts(const SimState& s) {
  StatusCounts c;
  for (const auto& p : s.patients) {
    switch (p.status) {
      case PatientStatus::Hidden: ++c.hidden; break;
      case PatientStatus::Unassigned: ++c.unassigned; break;
      case PatientStatus::Assigned: ++c.assigned; break;
      case PatientStatus::InTransit: ++c.in_transit; break;
      case PatientStatus::Admitted: ++c.admitted; break;
      case PatientStatus::Deceased: ++c.deceased; break;
    }
  }
  return c;
}

json state_to_json(const SimState& s) {
  const Scenario& sc = *s.scenario;
  json patients = json::array();
  for (const auto& p : s.patients) {
    json pj = {{"id", p.id},
               {"severity", static_cast<int>(p.severity)},
               {"status", to_string(p.status)},
               {"requirements", resource_to_json(p.requirements)}};
    if (p.entry_time >= 0) pj["entry_time"] = p.entry_time;
    if (p.hospital >= 0) {
      pj["hospital_id"] = sc.hospitals[static_cast<std::size_t>(p.hospital)].id;
      pj["departure_time"] = p.departure_time;
      pj["arrival_time"] = p.arrival_time;
      pj["matched"] = p.q;
    }
    patients.push_back(std::move(pj));
  }
  json hospitals = json::array();
  for (std::size_t j = 0; j < s.hospitals.size(); ++j) {
    hospitals.push_back({{"id", sc.hospitals[j].id},
                         {"name", sc.hospitals[j].name},
                         {"level", sc.hospitals[j].level},
                         {"effective", resource_to_json(s.hospitals[j].effective)},
                         {"reserved", resource_to_json(s.hospitals[j].reserved)},
                         {"travel", sc.travel.rows() > 0 ? sc.travel(0, static_cast<Eigen::Index>(j)) : 0.0}});
  }
  const StatusCounts c = status_counts(s);
  json unassigned_by_severity = {{"critical", 0}, {"severe", 0}, {"minor", 0}};
  for (const auto& p : s.patients)
    if (p.status == PatientStatus::Unassigned) unassigned_by_severity[std::string(to_string(p.severity))] =
        unassigned_by_severity[std::string(to_string(p.severity))].get<int>() + 1;
  return {{"scenario_id", sc.id},
          {"clock", s.clock},
          {"terminal", s.terminal},
          {"next_seq", s.event_log.size()},
          {"patients", patients},
          {"hospitals", hospitals},
          {"ambulances", {{"available", s.ambulances_available}, {"busy", s.ambulances_busy()}, {"fleet", s.fleet_size}}},
          {"status_bar",
           {{"elapsed", s.clock},
            {"unassigned", unassigned_by_severity},
            {"deaths", c.deceased},
            {"ambulances_available", s.ambulances_available}}}};
}

}  // namespace mci
