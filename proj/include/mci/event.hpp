// Timestamped simulation events and their newline-delimited JSON form.
#pragma once

#include "mci/core.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mci {

enum class EventKind {
  SessionStarted,
  PatientRevealed,
  AmbulanceAvailable,
  CapacityChanged,
  Assigned,
  Departed,
  Arrived,
  Died,
  AssignmentCancelled,
  SuggestionIssued,
  SuggestionAccepted,
  SuggestionDeclined,
  SessionEnded,
  Warning,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view name);

struct Event {
  std::int64_t seq = 0;
  int time = 0;  // simulated minutes
  EventKind kind = EventKind::Warning;
  std::optional<int> patient_id;
  std::optional<int> hospital_id;
  nlohmann::json payload = nlohmann::json::object();
  std::string color;  // display hint: red / yellow / green / gray / blue

  bool operator==(const Event&) const = default;
};

nlohmann::json event_to_json(const Event& e);
/// Throws Error(MalformedLog).
Event event_from_json(const nlohmann::json& j);

/// Kind-specific payload completeness; returns a description of each gap.
std::vector<std::string> validate_event(const Event& e);

/// One JSON object per line.
std::string serialize_log(const std::vector<Event>& log);
std::vector<Event> parse_log(const std::string& text);

}  // namespace mci
