#include "mci/event.hpp"
#include "mci/error.hpp"

#include <array>
#include <sstream>
#include <utility>

namespace mci {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 14> kKindNames = {{
    {EventKind::SessionStarted, "SessionStarted"},
    {EventKind::PatientRevealed, "PatientRevealed"},
    {EventKind::AmbulanceAvailable, "AmbulanceAvailable"},
    {EventKind::CapacityChanged, "CapacityChanged"},
    {EventKind::Assigned, "Assigned"},
    {EventKind::Departed, "Departed"},
    {EventKind::Arrived, "Arrived"},
    {EventKind::Died, "Died"},
    {EventKind::AssignmentCancelled, "AssignmentCancelled"},
    {EventKind::SuggestionIssued, "SuggestionIssued"},
    {EventKind::SuggestionAccepted, "SuggestionAccepted"},
    {EventKind::SuggestionDeclined, "SuggestionDeclined"},
    {EventKind::SessionEnded, "SessionEnded"},
    {EventKind::Warning, "Warning"},
}};

struct Requirement {
  EventKind kind;
  bool needs_patient;
  bool needs_hospital;
  std::vector<std::string_view> keys;
};

const std::vector<Requirement>& requirements() {
  static const std::vector<Requirement> table = {
      {EventKind::SessionStarted, false, false, {"scenario_id", "patient_count", "hospital_count", "horizon"}},
      {EventKind::PatientRevealed, true, false, {"severity", "requirements"}},
      {EventKind::AmbulanceAvailable, false, false, {"available", "fleet"}},
      {EventKind::CapacityChanged, false, true, {"capacities"}},
      {EventKind::Assigned, true, true, {"source", "matched", "required", "q", "Q", "level", "travel"}},
      {EventKind::Departed, true, true, {"arrival_time"}},
      {EventKind::Arrived, true, true, {"elapsed", "q", "Q", "level", "reward"}},
      {EventKind::Died, true, false, {"case", "reward"}},
      {EventKind::AssignmentCancelled, true, true, {}},
      {EventKind::SuggestionIssued, true, false, {"suggestion_id"}},
      {EventKind::SuggestionAccepted, true, true, {"suggestion_id"}},
      {EventKind::SuggestionDeclined, true, false, {"suggestion_id"}},
      {EventKind::SessionEnded, false, false, {"reason"}},
      {EventKind::Warning, false, false, {"message"}},
  };
  return table;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "Unknown";
}

std::optional<EventKind> event_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  return std::nullopt;
}

json event_to_json(const Event& e) {
  json j = {{"seq", e.seq}, {"time", e.time}, {"kind", to_string(e.kind)}, {"payload", e.payload}, {"color", e.color}};
  if (e.patient_id) j["patient_id"] = *e.patient_id;
  if (e.hospital_id) j["hospital_id"] = *e.hospital_id;
  return j;
}

Event event_from_json(const json& j) {
  try {
    Event e;
    e.seq = j.at("seq").get<std::int64_t>();
    e.time = j.at("time").get<int>();
    const auto kind = event_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::MalformedLog, "unknown event kind " + j.at("kind").dump());
    e.kind = *kind;
    if (j.contains("patient_id")) e.patient_id = j.at("patient_id").get<int>();
    if (j.contains("hospital_id")) e.hospital_id = j.at("hospital_id").get<int>();
    e.payload = j.value("payload", json::object());
    e.color = j.value("color", std::string{});
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::MalformedLog, std::string("malformed event record: ") + ex.what());
  }
}

std::vector<std::string> validate_event(const Event& e) {
  std::vector<std::string> gaps;
  for (const auto& r : requirements()) {
    if (r.kind != e.kind) continue;
    if (r.needs_patient && !e.patient_id) gaps.push_back("missing patient_id");
    if (r.needs_hospital && !e.hospital_id) gaps.push_back("missing hospital_id");
    for (auto key : r.keys)
      if (!e.payload.contains(key)) gaps.push_back("missing payload." + std::string(key));
  }
  if (e.time < 0) gaps.push_back("negative time");
  return gaps;
}

std::string serialize_log(const std::vector<Event>& log) {
  std::string out;
  for (const auto& e : log) {
    out += event_to_json(e).dump();
    out += '\n';
  }
  return out;
}

std::vector<Event> parse_log(const std::string& text) {
  std::vector<Event> log;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& ex) {
      throw Error(ErrorCode::MalformedLog, "line " + std::to_string(lineno) + ": " + ex.what());
    }
    log.push_back(event_from_json(j));
  }
  return log;
}

}  // namespace mci
