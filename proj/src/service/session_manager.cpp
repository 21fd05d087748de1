#include "mci/service/session_manager.hpp"
#include "mci/error.hpp"
#include "mci/evaluate.hpp"
#include "mci/greedy.hpp"
#include "mci/observation.hpp"
#include "mci/policy_io.hpp"
#include "mci/presets.hpp"
#include "mci/replay.hpp"
#include "mci/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace mci::service {

using nlohmann::json;

std::string_view to_string(SessionMode mode) {
  switch (mode) {
    case SessionMode::HumanOnly: return "HumanOnly";
    case SessionMode::HumanPlusAI: return "HumanPlusAI";
    case SessionMode::AIOnly: return "AIOnly";
  }
  return "?";
}

SessionMode mode_from_string(std::string_view name) {
  for (auto m : {SessionMode::HumanOnly, SessionMode::HumanPlusAI, SessionMode::AIOnly})
    if (to_string(m) == name) return m;
  throw Error(ErrorCode::Validation, "unknown session mode '" + std::string(name) + "'");
}

namespace {

std::string_view to_string(SuggestionStatus s) {
  switch (s) {
    case SuggestionStatus::Pending: return "pending";
    case SuggestionStatus::Accepted: return "accepted";
    case SuggestionStatus::Declined: return "declined";
    case SuggestionStatus::Stale: return "stale";
  }
  return "?";
}

std::optional<int> optional_int(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number_integer()) throw Error(ErrorCode::Validation, std::string("field '") + key + "' must be an integer");
  return j.at(key).get<int>();
}

int required_int(const json& j, const char* key, const std::string& type) {
  const auto v = optional_int(j, key);
  if (!v) throw Error(ErrorCode::Validation, type + " needs '" + key + "'");
  return *v;
}

json events_json(const std::vector<Event>& events) {
  json out = json::array();
  for (const auto& e : events) out.push_back(event_to_json(e));
  return out;
}

}  // namespace

Command command_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    throw Error(ErrorCode::Validation, "command needs a string 'type'");
  Command c;
  c.type = j.at("type").get<std::string>();
  if (c.type == "start" || c.type == "pause" || c.type == "end") return c;
  if (c.type == "step") {
    c.dt = optional_int(j, "dt").value_or(1);
    if (c.dt < 1) throw Error(ErrorCode::Validation, "step needs dt >= 1");
    return c;
  }
  if (c.type == "assign") {
    c.patient_id = required_int(j, "patient_id", c.type);
    c.hospital_id = required_int(j, "hospital_id", c.type);
    return c;
  }
  if (c.type == "cancel" || c.type == "request_suggestion") {
    c.patient_id = required_int(j, "patient_id", c.type);
    return c;
  }
  if (c.type == "accept_suggestion" || c.type == "decline_suggestion") {
    c.suggestion_id = required_int(j, "suggestion_id", c.type);
    return c;
  }
  throw Error(ErrorCode::Validation, "unknown command type '" + c.type + "'");
}

json command_result_to_json(const CommandResult& r) {
  json j = {{"accepted", r.accepted}, {"events", events_json(r.events)}, {"detail", r.detail}};
  if (!r.accepted) j["reason"] = r.reason;
  return j;
}

Session::Session(std::string id, std::shared_ptr<const Scenario> scenario, SessionOptions options, Policy policy)
    : id_(std::move(id)),
      scenario_(std::move(scenario)),
      options_(std::move(options)),
      policy_(std::move(policy)),
      rng_(splitmix64(scenario_->seed)) {
  if (!(options_.pacing >= 0.0) || !std::isfinite(options_.pacing))
    throw Error(ErrorCode::Validation, "pacing must be a finite number >= 0");
  // Fails early when a learned policy cannot see this scenario.
  policy_.caps_for_scenario(*scenario_);
  state_ = init_session(scenario_);
}

void Session::append(std::vector<Event>& out, std::vector<Event> events) {
  for (auto& e : events) out.push_back(std::move(e));
}

void Session::ai_act_locked(std::vector<Event>& out) {
  const ObservationCaps caps = policy_.caps_for_scenario(*scenario_);
  const ActMode mode = default_mode(policy_);
  const int limit = static_cast<int>(state_.patients.size()) + 1;
  for (int i = 0; i < limit && !state_.terminal; ++i) {
    const EncodedObservation obs = encode(state_, caps);
    if (!obs.any_action()) break;
    const Decision d = policy_.act(state_, obs, rng_, mode);
    if (d.action.is_wait()) break;
    const auto& p = state_.patients[static_cast<std::size_t>(d.action.patient_slot)];
    const auto& h = scenario_->hospitals[static_cast<std::size_t>(d.action.hospital_slot)];
    auto outcome = assign_patient(state_, p.id, h.id);
    if (!outcome.ok()) break;
    append(out, std::move(outcome.events));
  }
}

void Session::tick_locked(std::vector<Event>& out) {
  if (options_.mode == SessionMode::AIOnly) ai_act_locked(out);
  if (state_.terminal) return;
  append(out, step(state_, 1));
}

CommandResult Session::execute(const Command& c) {
  std::unique_lock lock(mu_);
  CommandResult r;
  const bool human = options_.mode != SessionMode::AIOnly;
  const bool advice = options_.mode != SessionMode::HumanOnly;
  const auto mode_error = [&](const std::string& what) {
    return Error(ErrorCode::ModeViolation, what + " is not allowed in " + std::string(to_string(options_.mode)) + " sessions");
  };

  if (c.type == "start") {
    if (!state_.terminal && !running_) {
      running_ = true;
      run_anchor_ = std::chrono::steady_clock::now();
      paced_ticks_ = 0;
    }
    r.detail["running"] = running_;
  } else if (c.type == "pause") {
    running_ = false;
    r.detail["running"] = false;
  } else if (c.type == "step") {
    if (state_.terminal) {
      auto warning = step(state_, c.dt);
      r.detail["warning"] = event_to_json(warning.front());
    } else {
      for (int i = 0; i < c.dt && !state_.terminal; ++i) tick_locked(r.events);
    }
  } else if (c.type == "assign" || c.type == "cancel") {
    if (!human) throw mode_error("manual " + c.type);
    auto outcome = c.type == "assign" ? assign_patient(state_, *c.patient_id, *c.hospital_id)
                                      : cancel_assignment(state_, *c.patient_id);
    if (!outcome.ok()) {
      r.accepted = false;
      r.reason = std::string(to_string(outcome.rejection->reason));
      r.detail["message"] = outcome.rejection->detail;
    }
    r.events = std::move(outcome.events);
  } else if (c.type == "request_suggestion") {
    if (!advice) throw mode_error("request_suggestion");
    r = suggest_locked(*c.patient_id);
  } else if (c.type == "accept_suggestion") {
    if (!advice) throw mode_error("accept_suggestion");
    if (!human) throw mode_error("accept_suggestion");
    r = accept_locked(*c.suggestion_id);
  } else if (c.type == "decline_suggestion") {
    if (!advice || !human) throw mode_error("decline_suggestion");
    r = decline_locked(*c.suggestion_id);
  } else if (c.type == "end") {
    running_ = false;
    r.events = end_session(state_, "ended");
  } else {
    throw Error(ErrorCode::Validation, "unknown command type '" + c.type + "'");
  }
  if (state_.terminal) {
    running_ = false;
    r.detail["report"] = report_to_json(outcome_report(state_.event_log));
  }
  const bool notify = !r.events.empty() || state_.terminal;
  lock.unlock();
  if (notify) cv_.notify_all();
  return r;
}

CommandResult Session::suggest_locked(int patient_id) {
  CommandResult r;
  if (state_.terminal) {
    r.accepted = false;
    r.reason = std::string(to_string(RejectReason::Terminal));
    return r;
  }
  std::optional<int> hospital;
  std::optional<Projection> projection;
  if (policy_.kind() == PolicyKind::Learned) {
    const auto it = std::find_if(state_.patients.begin(), state_.patients.end(),
                                 [&](const PatientState& p) { return p.id == patient_id; });
    if (it == state_.patients.end()) throw Error(ErrorCode::NotFound, "unknown patient " + std::to_string(patient_id));
    if (it->status != PatientStatus::Unassigned)
      throw Error(ErrorCode::InvalidArgument, "patient " + std::to_string(patient_id) + " is not unassigned");
    const auto p = static_cast<std::size_t>(it - state_.patients.begin());
    const ObservationCaps caps = policy_.caps_for_scenario(*scenario_);
    const auto [log_probs, value] = policy_.distribution(encode(state_, caps));
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h < state_.hospitals.size(); ++h) {
      const double lp = log_probs[static_cast<Eigen::Index>(p) * caps.max_hospitals + static_cast<Eigen::Index>(h)];
      if (lp > best) {
        best = lp;
        hospital = scenario_->hospitals[h].id;
        projection = project_assignment(state_, p, h);
      }
    }
  } else if (auto s = greedy_suggest(state_, patient_id)) {
    hospital = s->hospital_id;
    projection = s->projection;
  }

  const int id = next_suggestion_++;
  suggestions_[id] = {id, patient_id, hospital, state_.clock, SuggestionStatus::Pending};
  json payload = {{"suggestion_id", id}, {"policy", policy_.name()}, {"hospital_id", nullptr}};
  if (hospital) {
    payload["hospital_id"] = *hospital;
    payload["projected_reward"] = projection->reward;
    payload["pt"] = projection->pt;
    payload["pq"] = projection->pq;
    payload["travel"] = projection->travel;
    payload["q"] = projection->q;
    payload["Q"] = projection->Q;
  } else {
    payload["message"] = "no hospital improves on leaving the patient unassigned";
  }
  r.events.push_back(record_event(state_, EventKind::SuggestionIssued, patient_id, hospital, payload));
  r.detail["suggestion_id"] = id;
  return r;
}

CommandResult Session::accept_locked(int suggestion_id) {
  const auto it = suggestions_.find(suggestion_id);
  if (it == suggestions_.end()) throw Error(ErrorCode::NotFound, "unknown suggestion " + std::to_string(suggestion_id));
  SuggestionRecord& s = it->second;
  CommandResult r;
  r.detail["suggestion_id"] = suggestion_id;
  if (s.status != SuggestionStatus::Pending || !s.hospital_id) {
    r.accepted = false;
    r.reason = s.hospital_id ? "suggestion " + std::string(to_string(s.status)) : "suggestion has no hospital";
    return r;
  }
  // Capacity is re-checked by the engine at accept time.
  auto outcome = assign_patient(state_, s.patient_id, *s.hospital_id, AssignSource::SuggestionAccepted);
  if (!outcome.ok()) {
    s.status = SuggestionStatus::Stale;
    r.accepted = false;
    r.reason = std::string(to_string(outcome.rejection->reason));
    r.detail["message"] = outcome.rejection->detail;
    r.detail["stale"] = true;
    return r;
  }
  s.status = SuggestionStatus::Accepted;
  r.events = std::move(outcome.events);
  r.events.push_back(record_event(state_, EventKind::SuggestionAccepted, s.patient_id, s.hospital_id,
                                  {{"suggestion_id", suggestion_id}}));
  return r;
}

CommandResult Session::decline_locked(int suggestion_id) {
  const auto it = suggestions_.find(suggestion_id);
  if (it == suggestions_.end()) throw Error(ErrorCode::NotFound, "unknown suggestion " + std::to_string(suggestion_id));
  SuggestionRecord& s = it->second;
  CommandResult r;
  r.detail["suggestion_id"] = suggestion_id;
  if (s.status != SuggestionStatus::Pending) {
    r.accepted = false;
    r.reason = "suggestion " + std::string(to_string(s.status));
    return r;
  }
  s.status = SuggestionStatus::Declined;
  r.events.push_back(record_event(state_, EventKind::SuggestionDeclined, s.patient_id, std::nullopt,
                                  {{"suggestion_id", suggestion_id}}));
  return r;
}

bool Session::advance(std::chrono::steady_clock::time_point now) {
  std::unique_lock lock(mu_);
  if (!running_ || options_.pacing <= 0.0 || state_.terminal) return false;
  const double elapsed = std::chrono::duration<double>(now - run_anchor_).count();
  const long due = static_cast<long>(std::floor(elapsed * options_.pacing)) - paced_ticks_;
  if (due <= 0) return false;
  std::vector<Event> out;
  for (long i = 0; i < due && !state_.terminal; ++i) {
    tick_locked(out);
    ++paced_ticks_;
  }
  if (state_.terminal) running_ = false;
  const bool ended = state_.terminal;
  lock.unlock();
  cv_.notify_all();
  return ended;
}

std::vector<Event> Session::events_from(std::int64_t from, std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  const auto ready = [&] {
    return static_cast<std::int64_t>(state_.event_log.size()) > from || state_.terminal;
  };
  if (timeout.count() > 0) cv_.wait_for(lock, timeout, ready);
  std::vector<Event> out;
  for (std::size_t i = static_cast<std::size_t>(std::max<std::int64_t>(from, 0)); i < state_.event_log.size(); ++i)
    out.push_back(state_.event_log[i]);
  return out;
}

json Session::state_json() {
  std::lock_guard lock(mu_);
  json j = state_to_json(state_);
  j["session_id"] = id_;
  j["mode"] = to_string(options_.mode);
  j["pacing"] = options_.pacing;
  j["running"] = running_;
  j["policy"] = policy_.name();
  j["created_at"] = std::chrono::duration_cast<std::chrono::seconds>(created_.time_since_epoch()).count();
  json suggestions = json::array();
  for (const auto& [id, s] : suggestions_)
    suggestions.push_back({{"suggestion_id", id},
                           {"patient_id", s.patient_id},
                           {"hospital_id", s.hospital_id ? json(*s.hospital_id) : json(nullptr)},
                           {"issued_at", s.issued_at},
                           {"status", to_string(s.status)}});
  j["suggestions"] = suggestions;
  return j;
}

bool Session::terminal() {
  std::lock_guard lock(mu_);
  return state_.terminal;
}

bool Session::finalized() {
  std::lock_guard lock(mu_);
  return finalized_;
}

SimState Session::snapshot() {
  std::lock_guard lock(mu_);
  return state_;
}

bool Session::mark_finalized() {
  std::lock_guard lock(mu_);
  if (finalized_) return false;
  finalized_ = true;
  return true;
}

SessionManager::SessionManager(std::filesystem::path archive_dir) : archive_dir_(std::move(archive_dir)) {
  pacer_ = std::thread([this] { pacing_loop(); });
}

SessionManager::~SessionManager() {
  stop_ = true;
  if (pacer_.joinable()) pacer_.join();
}

void SessionManager::pacing_loop() {
  while (!stop_) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    std::vector<std::shared_ptr<Session>> live;
    {
      std::lock_guard lock(registry_mu_);
      for (const auto& [id, s] : sessions_) live.push_back(s);
    }
    const auto now = std::chrono::steady_clock::now();
    for (const auto& s : live)
      if (s->advance(now)) finalize(s);
  }
}

void SessionManager::finalize(const std::shared_ptr<Session>& s) {
  if (!s->mark_finalized() || archive_dir_.empty()) return;
  try {
    persist(s->id());
  } catch (const Error& e) {
    std::cerr << "session " << s->id() << ": " << e.what() << "\n";
  }
}

std::string SessionManager::add_scenario(const Scenario& scenario) {
  const auto violations = validate_scenario(scenario);
  if (!violations.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& v : violations) msg += " " + v.subject + ": " + v.message + ";";
    throw Error(ErrorCode::Validation, msg);
  }
  if (scenario.id.empty()) throw Error(ErrorCode::Validation, "scenario needs a scenario_id");
  std::lock_guard lock(registry_mu_);
  scenarios_[scenario.id] = std::make_shared<const Scenario>(scenario);
  return scenario.id;
}

std::vector<std::string> SessionManager::scenario_ids() {
  std::vector<std::string> ids = {"standard", "complex", "small"};
  std::lock_guard lock(registry_mu_);
  for (const auto& [id, s] : scenarios_) ids.push_back(id);
  return ids;
}

std::shared_ptr<const Scenario> SessionManager::find_scenario(const std::string& id, std::uint64_t seed) {
  {
    std::lock_guard lock(registry_mu_);
    if (const auto it = scenarios_.find(id); it != scenarios_.end()) return it->second;
  }
  if (auto preset = preset_scenario(id, seed)) return std::make_shared<const Scenario>(std::move(*preset));
  throw Error(ErrorCode::NotFound, "unknown scenario '" + id + "'");
}

std::string SessionManager::create_session(std::shared_ptr<const Scenario> scenario, const SessionOptions& options) {
  Policy policy = resolve_policy(options.policy);
  std::lock_guard lock(registry_mu_);
  const std::string id = "s" + std::to_string(next_session_);
  sessions_[id] = std::make_shared<Session>(id, std::move(scenario), options, std::move(policy));
  ++next_session_;
  return id;
}

std::string SessionManager::create_session(const std::string& scenario_id, std::uint64_t seed,
                                           const SessionOptions& options) {
  return create_session(find_scenario(scenario_id, seed), options);
}

std::shared_ptr<Session> SessionManager::session(const std::string& id) {
  std::lock_guard lock(registry_mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "unknown session '" + id + "'");
  return it->second;
}

std::vector<std::string> SessionManager::session_ids() {
  std::lock_guard lock(registry_mu_);
  std::vector<std::string> ids;
  for (const auto& [id, s] : sessions_) ids.push_back(id);
  return ids;
}

CommandResult SessionManager::command(const std::string& id, const Command& command) {
  const auto s = session(id);
  CommandResult r = s->execute(command);
  if (s->terminal()) finalize(s);
  return r;
}

std::filesystem::path SessionManager::persist(const std::string& id) {
  if (archive_dir_.empty()) throw Error(ErrorCode::Storage, "no archive directory configured");
  const auto s = session(id);
  const SimState state = s->snapshot();
  json events = json::array();
  for (const auto& e : state.event_log) events.push_back(event_to_json(e));
  const json record = {{"session_id", id},
                       {"mode", to_string(s->mode())},
                       {"scenario", scenario_to_json(*state.scenario)},
                       {"events", events},
                       {"final_clock", state.clock},
                       {"terminal", state.terminal},
                       {"report", report_to_json(outcome_report(state.event_log))}};
  std::error_code ec;
  std::filesystem::create_directories(archive_dir_, ec);
  const auto path = archive_dir_ / (id + ".json");
  const auto tmp = archive_dir_ / (id + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Storage, "cannot write " + tmp.string());
    out << record.dump(2) << "\n";
    if (!out) throw Error(ErrorCode::Storage, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Storage, "cannot move archive into place: " + ec.message());
  return path;
}

ArchivedSession SessionManager::load_session(const std::string& id) {
  if (archive_dir_.empty()) throw Error(ErrorCode::NotFound, "no archived session '" + id + "'");
  const auto path = archive_dir_ / (id + ".json");
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    if (ec) throw Error(ErrorCode::Storage, "cannot access " + path.string() + ": " + ec.message());
    throw Error(ErrorCode::NotFound, "no archived session '" + id + "'");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Storage, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  ArchivedSession out;
  try {
    out.record = json::parse(buffer.str());
    auto scenario = std::make_shared<const Scenario>(scenario_from_json(out.record.at("scenario")));
    std::vector<Event> log;
    for (const auto& e : out.record.at("events")) log.push_back(event_from_json(e));
    out.state = replay(scenario, log, out.record.at("final_clock").get<int>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Storage, "corrupt archive " + path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::Storage, "corrupt archive " + path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace mci::service
