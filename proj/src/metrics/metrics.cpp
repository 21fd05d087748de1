#include "mci/metrics.hpp"
#include "mci/error.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace mci {

namespace {

const Event& session_start(const std::vector<Event>& log) {
  for (const auto& e : log)
    if (e.kind == EventKind::SessionStarted) return e;
  throw Error(ErrorCode::MalformedLog, "log has no SessionStarted marker");
}

int vector_sum(const nlohmann::json& v) {
  int s = 0;
  for (const auto& x : v) s += x.get<int>();
  return s;
}

struct Fold {
  std::map<int, const Event*> last_assigned;  // patient -> most recent Assigned
  std::map<int, const Event*> arrived;
  std::map<int, const Event*> died;
};

Fold fold(const std::vector<Event>& log) {
  Fold f;
  for (const auto& e : log) {
    if (!e.patient_id) continue;
    if (e.kind == EventKind::Assigned) f.last_assigned[*e.patient_id] = &e;
    if (e.kind == EventKind::AssignmentCancelled) f.last_assigned.erase(*e.patient_id);
    if (e.kind == EventKind::Arrived) f.arrived[*e.patient_id] = &e;
    if (e.kind == EventKind::Died) f.died[*e.patient_id] = &e;
  }
  return f;
}

}  // namespace

double completion_time(const std::vector<Event>& log) {
  const double start = session_start(log).time;
  std::optional<int> last_assign;
  std::optional<int> ended;
  for (const auto& e : log) {
    if (e.kind == EventKind::Assigned) last_assign = e.time;
    if (e.kind == EventKind::SessionEnded) ended = e.time;
  }
  if (last_assign) return *last_assign - start;
  if (ended) return *ended - start;
  throw Error(ErrorCode::MalformedLog, "log has neither an assignment nor a SessionEnded marker");
}

double mortality_rate(const std::vector<Event>& log) {
  const int total = session_start(log).payload.value("patient_count", 0);
  if (total <= 0) throw Error(ErrorCode::MalformedLog, "SessionStarted carries no patient_count");
  const auto deaths = std::count_if(log.begin(), log.end(), [](const Event& e) { return e.kind == EventKind::Died; });
  return static_cast<double>(deaths) / total * 100.0;
}

double match_rate(const std::vector<Event>& log) {
  const Fold f = fold(log);
  double acc = 0.0;
  int n = 0;
  for (const auto& [pid, arrival] : f.arrived) {
    const auto it = f.last_assigned.find(pid);
    if (it == f.last_assigned.end())
      throw Error(ErrorCode::MalformedLog, "patient " + std::to_string(pid) + " arrived without an assignment");
    const int correct = vector_sum(it->second->payload.at("matched"));
    const int needed = vector_sum(it->second->payload.at("required"));
    acc += needed == 0 ? 1.0 : static_cast<double>(correct) / needed;
    ++n;
  }
  return n == 0 ? 0.0 : acc / n * 100.0;
}

OutcomeReport outcome_report(const std::vector<Event>& log) {
  OutcomeReport r;
  const Event& start = session_start(log);
  r.total_patients = start.payload.value("patient_count", 0);
  r.completion_time = completion_time(log);
  r.mortality_rate = mortality_rate(log);
  r.match_rate = match_rate(log);

  const Fold f = fold(log);
  std::map<int, PatientOutcome> rows;
  for (const auto& e : log)
    if (e.kind == EventKind::PatientRevealed) rows[*e.patient_id].patient_id = *e.patient_id;
  for (auto& [pid, row] : rows) {
    row.patient_id = pid;
    row.outcome = "unresolved";
    if (const auto a = f.last_assigned.find(pid); a != f.last_assigned.end()) {
      row.hospital_id = a->second->hospital_id;
      row.matched = vector_sum(a->second->payload.at("matched"));
      row.required = vector_sum(a->second->payload.at("required"));
    }
    if (const auto a = f.arrived.find(pid); a != f.arrived.end()) {
      row.outcome = "admitted";
      row.elapsed = a->second->payload.at("elapsed").get<int>();
      ++r.admitted;
    }
    if (f.died.count(pid)) {
      row.outcome = "deceased";
      ++r.deaths;
    }
    r.patients.push_back(row);
  }
  return r;
}

nlohmann::json report_to_json(const OutcomeReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : r.patients) {
    nlohmann::json row = {{"patient_id", p.patient_id}, {"outcome", p.outcome}, {"matched", p.matched}, {"required", p.required}};
    row["hospital_id"] = p.hospital_id ? nlohmann::json(*p.hospital_id) : nlohmann::json(nullptr);
    row["elapsed"] = p.elapsed ? nlohmann::json(*p.elapsed) : nlohmann::json(nullptr);
    rows.push_back(std::move(row));
  }
  return {{"completion_time", r.completion_time},
          {"mortality_rate", r.mortality_rate},
          {"match_rate", r.match_rate},
          {"deaths", r.deaths},
          {"total_patients", r.total_patients},
          {"admitted", r.admitted},
          {"patients", rows}};
}

OutcomeReport report_from_json(const nlohmann::json& j) {
  OutcomeReport r;
  r.completion_time = j.at("completion_time").get<double>();
  r.mortality_rate = j.at("mortality_rate").get<double>();
  r.match_rate = j.at("match_rate").get<double>();
  r.deaths = j.at("deaths").get<int>();
  r.total_patients = j.at("total_patients").get<int>();
  r.admitted = j.at("admitted").get<int>();
  for (const auto& row : j.at("patients")) {
    PatientOutcome p;
    p.patient_id = row.at("patient_id").get<int>();
    p.outcome = row.at("outcome").get<std::string>();
    p.matched = row.at("matched").get<int>();
    p.required = row.at("required").get<int>();
    if (!row.at("hospital_id").is_null()) p.hospital_id = row.at("hospital_id").get<int>();
    if (!row.at("elapsed").is_null()) p.elapsed = row.at("elapsed").get<int>();
    r.patients.push_back(p);
  }
  return r;
}

std::string report_to_csv(const OutcomeReport& r) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << "metric,value\n"
      << "completion_time," << r.completion_time << "\n"
      << "mortality_rate," << r.mortality_rate << "\n"
      << "match_rate," << r.match_rate << "\n"
      << "deaths," << r.deaths << "\n"
      << "total_patients," << r.total_patients << "\n"
      << "admitted," << r.admitted << "\n\n"
      << "patient_id,outcome,hospital_id,matched,required,elapsed\n";
  for (const auto& p : r.patients) {
    out << p.patient_id << ',' << p.outcome << ',' << (p.hospital_id ? std::to_string(*p.hospital_id) : "") << ','
        << p.matched << ',' << p.required << ',' << (p.elapsed ? std::to_string(*p.elapsed) : "") << "\n";
  }
  return out.str();
}

}  // namespace mci
