#include "mci/replay.hpp"
#include "mci/error.hpp"

#include <string>

namespace mci {

namespace {

void advance_to(SimState& s, int t) {
  if (t < s.clock) throw Error(ErrorCode::MalformedLog, "event timestamps go backwards");
  if (t == s.clock) return;
  if (s.terminal) throw Error(ErrorCode::MalformedLog, "log continues after the session became terminal");
  step(s, t - s.clock);
  if (s.clock != t) throw Error(ErrorCode::MalformedLog, "session ended before minute " + std::to_string(t));
}

void expect_ok(const ActionOutcome& o, const Event& e) {
  if (!o.ok())
    throw Error(ErrorCode::MalformedLog, "event seq " + std::to_string(e.seq) + " not reproducible: " +
                                             std::string(to_string(o.rejection->reason)));
}

}  // namespace

SimState replay(std::shared_ptr<const Scenario> scenario, const std::vector<Event>& log, std::optional<int> final_clock) {
  SimState s = init_session(std::move(scenario));
  for (const auto& e : log) {
    switch (e.kind) {
      case EventKind::Assigned: {
        advance_to(s, e.time);
        if (!e.patient_id || !e.hospital_id) throw Error(ErrorCode::MalformedLog, "Assigned event without ids");
        const auto source = e.payload.value("source", std::string("Manual")) == "SuggestionAccepted"
                                ? AssignSource::SuggestionAccepted
                                : AssignSource::Manual;
        expect_ok(assign_patient(s, *e.patient_id, *e.hospital_id, source), e);
        break;
      }
      case EventKind::AssignmentCancelled:
        advance_to(s, e.time);
        if (!e.patient_id) throw Error(ErrorCode::MalformedLog, "AssignmentCancelled without patient_id");
        expect_ok(cancel_assignment(s, *e.patient_id), e);
        break;
      case EventKind::SuggestionIssued:
      case EventKind::SuggestionAccepted:
      case EventKind::SuggestionDeclined:
        advance_to(s, e.time);
        record_event(s, e.kind, e.patient_id, e.hospital_id, e.payload);
        break;
      case EventKind::SessionEnded: {
        const std::string reason = e.payload.value("reason", std::string{});
        if (reason != "resolved" && reason != "horizon") {
          advance_to(s, e.time);
          end_session(s, reason);
        }
        break;
      }
      default: break;
    }
  }
  const int target = final_clock ? *final_clock : (log.empty() ? 0 : log.back().time);
  if (!s.terminal && target > s.clock) advance_to(s, target);
  return s;
}

bool replay_matches(std::shared_ptr<const Scenario> scenario, const std::vector<Event>& log) {
  try {
    const SimState s = replay(std::move(scenario), log);
    return serialize_log(s.event_log) == serialize_log(log);
  } catch (const Error&) {
    return false;
  }
}

}  // namespace mci
