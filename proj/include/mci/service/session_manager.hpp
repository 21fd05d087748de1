// Live simulation sessions: a guarded registry of sessions, each with its own
// command lock, optional real-time pacing and an archive written on end.
#pragma once

#include "mci/engine.hpp"
#include "mci/metrics.hpp"
#include "mci/policy.hpp"

#include "json.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace mci::service {

enum class SessionMode { HumanOnly, HumanPlusAI, AIOnly };

std::string_view to_string(SessionMode mode);
/// Throws Error(Validation) for anything else.
SessionMode mode_from_string(std::string_view name);

struct SessionOptions {
  SessionMode mode = SessionMode::HumanPlusAI;
  double pacing = 1.0;  // ticks per real second; 0 = manual stepping only
  std::string policy = "greedy";  // "greedy", "random" or a policy file
};

struct Command {
  std::string type;  // start pause step assign cancel request_suggestion accept_suggestion decline_suggestion end
  int dt = 1;
  std::optional<int> patient_id;
  std::optional<int> hospital_id;
  std::optional<int> suggestion_id;
};

/// Throws Error(Validation) on unknown types or missing fields.
Command command_from_json(const nlohmann::json& j);

struct CommandResult {
  bool accepted = true;
  std::string reason;          // engine rejection reason when !accepted
  std::vector<Event> events;   // appended to the session log by this command
  nlohmann::json detail = nlohmann::json::object();
};

nlohmann::json command_result_to_json(const CommandResult& r);

enum class SuggestionStatus { Pending, Accepted, Declined, Stale };

struct SuggestionRecord {
  int id = 0;
  int patient_id = 0;
  std::optional<int> hospital_id;
  int issued_at = 0;
  SuggestionStatus status = SuggestionStatus::Pending;
};

class Session {
 public:
  Session(std::string id, std::shared_ptr<const Scenario> scenario, SessionOptions options, Policy policy);

  const std::string& id() const { return id_; }
  SessionMode mode() const { return options_.mode; }
  std::shared_ptr<const Scenario> scenario() const { return scenario_; }

  /// Serialized against every other command and pacing tick of this session.
  CommandResult execute(const Command& command);

  /// Runs due paced ticks; returns true when the session just became terminal.
  bool advance(std::chrono::steady_clock::time_point now);

  /// Events with seq >= from, waiting up to `timeout` for at least one when none are ready.
  std::vector<Event> events_from(std::int64_t from, std::chrono::milliseconds timeout = std::chrono::milliseconds(0));

  nlohmann::json state_json();
  bool terminal();
  bool finalized();
  SimState snapshot();

  /// Marks the session archived; returns false when it already was.
  bool mark_finalized();

 private:
  void tick_locked(std::vector<Event>& out);
  void ai_act_locked(std::vector<Event>& out);
  void append(std::vector<Event>& out, std::vector<Event> events);
  CommandResult suggest_locked(int patient_id);
  CommandResult accept_locked(int suggestion_id);
  CommandResult decline_locked(int suggestion_id);

  std::string id_;
  std::shared_ptr<const Scenario> scenario_;
  SessionOptions options_;
  Policy policy_;
  Rng rng_;

  std::mutex mu_;
  std::condition_variable cv_;
  SimState state_;
  bool running_ = false;
  bool finalized_ = false;
  std::chrono::steady_clock::time_point run_anchor_{};
  long paced_ticks_ = 0;
  std::chrono::system_clock::time_point created_ = std::chrono::system_clock::now();
  std::map<int, SuggestionRecord> suggestions_;
  int next_suggestion_ = 1;
};

/// Archived record: scenario, full log, outcome report and mode.
struct ArchivedSession {
  nlohmann::json record;
  SimState state;  // reconstructed by replay
};

class SessionManager {
 public:
  /// Archives go to `archive_dir` (created on demand); empty disables persistence.
  explicit SessionManager(std::filesystem::path archive_dir = {});
  ~SessionManager();

  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  /// Registers an uploaded scenario; throws Error(Validation) when invalid.
  std::string add_scenario(const Scenario& scenario);
  /// Registered scenario ids plus the preset names.
  std::vector<std::string> scenario_ids();
  /// Registered id, or "standard"/"complex"/"small" with `seed`. Throws Error(NotFound).
  std::shared_ptr<const Scenario> find_scenario(const std::string& id, std::uint64_t seed = 0);

  std::string create_session(std::shared_ptr<const Scenario> scenario, const SessionOptions& options);
  std::string create_session(const std::string& scenario_id, std::uint64_t seed, const SessionOptions& options);

  /// Throws Error(NotFound).
  std::shared_ptr<Session> session(const std::string& id);
  std::vector<std::string> session_ids();

  CommandResult command(const std::string& id, const Command& command);

  /// Writes the archive for a live session (snapshot or final).
  std::filesystem::path persist(const std::string& id);
  /// Reads an archive and replays it. Error(NotFound) when no archive exists,
  /// Error(Storage) when it cannot be read or parsed.
  ArchivedSession load_session(const std::string& id);

 private:
  void pacing_loop();
  void finalize(const std::shared_ptr<Session>& s);

  std::filesystem::path archive_dir_;
  std::mutex registry_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::shared_ptr<const Scenario>> scenarios_;
  std::uint64_t next_session_ = 1;

  std::atomic<bool> stop_{false};
  std::thread pacer_;
};

}  // namespace mci::service
