// Deterministic minute-tick simulation of an MCI: patient reveal, ambulance
// and hospital-capacity growth, transport, admission and death.
#pragma once

#include "mci/core.hpp"
#include "mci/event.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mci {

enum class AssignSource { Manual, SuggestionAccepted };

std::string_view to_string(AssignSource s);

enum class RejectReason {
  NotFound,
  InvalidStatus,
  NoEmergencyCapacity,
  NoAmbulance,
  AlreadyDeparted,
  Terminal,
};

std::string_view to_string(RejectReason r);

struct Rejection {
  RejectReason reason;
  std::string detail;
};

struct PatientState {
  int id = 0;
  Severity severity = Severity::Minor;
  ResourceVector requirements = ResourceVector::Zero();
  double survival_window = kUnbounded;
  int reveal_time = 0;

  PatientStatus status = PatientStatus::Hidden;
  int entry_time = -1;
  int hospital = -1;  // hospital index, -1 when none
  int departure_time = -1;
  int arrival_time = -1;
  ResourceVector reserved = ResourceVector::Zero();
  int q = 0;  // matched requirement kinds at assignment

  bool operator==(const PatientState&) const = default;
};

struct HospitalState {
  ResourceVector effective = ResourceVector::Zero();
  ResourceVector reserved = ResourceVector::Zero();

  ResourceVector unreserved() const { return effective - reserved; }
  bool operator==(const HospitalState&) const = default;
};

struct SimState {
  std::shared_ptr<const Scenario> scenario;
  int clock = 0;
  std::vector<PatientState> patients;     // scenario roster order
  std::vector<HospitalState> hospitals;   // scenario roster order
  int fleet_size = 0;
  int ambulances_available = 0;
  std::vector<int> ambulance_returns;     // sorted return minutes of busy ambulances
  std::vector<Event> event_log;
  bool terminal = false;

  int ambulances_busy() const { return static_cast<int>(ambulance_returns.size()); }
};

/// Equality of everything except the event log.
bool same_state(const SimState& a, const SimState& b);

struct ActionOutcome {
  std::vector<Event> events;
  std::optional<Rejection> rejection;
  bool ok() const { return !rejection.has_value(); }
};

/// Throws Error(Validation) listing violations when the scenario is unusable.
SimState init_session(std::shared_ptr<const Scenario> scenario);
SimState init_session(const Scenario& scenario);

/// Advances `dt` one-minute ticks (stopping early at terminal). On a terminal
/// state nothing changes and a single unlogged Warning event is returned.
std::vector<Event> step(SimState& state, int dt);

/// Admissibility of sending patient index p to hospital index h right now.
std::optional<RejectReason> check_assignment(const SimState& state, std::size_t p, std::size_t h);

/// On rejection the state is untouched.
ActionOutcome assign_patient(SimState& state, int patient_id, int hospital_id,
                             AssignSource source = AssignSource::Manual);

/// Same-tick undo of an assignment.
ActionOutcome cancel_assignment(SimState& state, int patient_id);

/// Appends an annotation event (suggestions) stamped with the current clock.
Event record_event(SimState& state, EventKind kind, std::optional<int> patient_id, std::optional<int> hospital_id,
                   nlohmann::json payload);

/// Forces termination; emits SessionEnded unless already terminal.
std::vector<Event> end_session(SimState& state, std::string_view reason = "ended");

/// Whole-minute transport time used by the engine for a (patient, hospital) pair.
int travel_minutes(const SimState& state, std::size_t p, std::size_t h);

struct StatusCounts {
  int hidden = 0, unassigned = 0, assigned = 0, in_transit = 0, admitted = 0, deceased = 0;
  int total() const { return hidden + unassigned + assigned + in_transit + admitted + deceased; }
};

StatusCounts status_counts(const SimState& state);

nlohmann::json state_to_json(const SimState& state);

}  // namespace mci
