#include "doctest.h"
#include "support.hpp"

#include "mci/error.hpp"
#include "mci/scenario_io.hpp"
#include "mci/service/http_server.hpp"
#include "mci/service/session_manager.hpp"

#include "httplib.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include <unistd.h>

using namespace mci;
using namespace mci::service;
using namespace mci::test;
using nlohmann::json;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("mci_service_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

Command cmd(std::string type) {
  Command c;
  c.type = std::move(type);
  return c;
}

Command assign(int p, int h) {
  Command c = cmd("assign");
  c.patient_id = p;
  c.hospital_id = h;
  return c;
}

Command stepping(int dt) {
  Command c = cmd("step");
  c.dt = dt;
  return c;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

SessionOptions manual(SessionMode mode) {
  SessionOptions o;
  o.mode = mode;
  o.pacing = 0.0;
  return o;
}

// Two patients competing for one emergency bed.
std::shared_ptr<const Scenario> contended() {
  return make_scenario({patient(1, Severity::Critical, rv({0, 1}), 60), patient(2, Severity::Critical, rv({0, 1}), 60)},
                       {hospital(1, 1, rv({0, 1}))}, {10});
}

}  // namespace

TEST_CASE("command parsing") {
  const Command c = command_from_json({{"type", "assign"}, {"patient_id", 3}, {"hospital_id", 2}});
  CHECK(c.patient_id == 3);
  CHECK(c.hospital_id == 2);
  CHECK(command_from_json({{"type", "step"}, {"dt", 5}}).dt == 5);
  CHECK(code_of([] { command_from_json({{"type", "fly"}}); }) == ErrorCode::Validation);
  CHECK(code_of([] { command_from_json({{"type", "assign"}, {"patient_id", 3}}); }) == ErrorCode::Validation);
  CHECK(code_of([] { mode_from_string("Robot"); }) == ErrorCode::Validation);
  CHECK(mode_from_string("AIOnly") == SessionMode::AIOnly);
}

TEST_CASE("modes gate commands") {
  SessionManager m;
  const auto human = m.create_session(contended(), manual(SessionMode::HumanOnly));
  const auto ai = m.create_session(contended(), manual(SessionMode::AIOnly));
  CHECK(human != ai);
  Command req = cmd("request_suggestion");
  req.patient_id = 1;
  CHECK(code_of([&] { m.command(human, req); }) == ErrorCode::ModeViolation);
  CHECK(code_of([&] { m.command(ai, assign(1, 1)); }) == ErrorCode::ModeViolation);
  Command cancel = cmd("cancel");
  cancel.patient_id = 1;
  CHECK(code_of([&] { m.command(ai, cancel); }) == ErrorCode::ModeViolation);
  CHECK(m.command(human, assign(1, 1)).accepted);

  const auto r = m.command(human, assign(2, 1));
  CHECK_FALSE(r.accepted);
  CHECK(r.reason == "NoEmergencyCapacity");

  // AIOnly: the policy acts before each tick.
  const auto stepped = m.command(ai, stepping(1));
  CHECK(std::any_of(stepped.events.begin(), stepped.events.end(), [](const Event& e) { return e.kind == EventKind::Assigned; }));

  CHECK(code_of([&] { m.command("s999", stepping(1)); }) == ErrorCode::NotFound);
  CHECK(code_of([&] { m.find_scenario("nope"); }) == ErrorCode::NotFound);
  SessionOptions bad = manual(SessionMode::HumanOnly);
  bad.pacing = -1;
  CHECK(code_of([&] { m.create_session(contended(), bad); }) == ErrorCode::Validation);
}

TEST_CASE("suggestions") {
  SessionManager m;
  const auto id = m.create_session(contended(), manual(SessionMode::HumanPlusAI));
  Command req = cmd("request_suggestion");
  req.patient_id = 1;
  const auto issued = m.command(id, req);
  REQUIRE(issued.events.size() == 1);
  CHECK(issued.events[0].kind == EventKind::SuggestionIssued);
  CHECK(issued.events[0].payload.at("hospital_id") == 1);
  CHECK(issued.events[0].payload.at("projected_reward") == doctest::Approx(600.0 - 300.0 * 10.0 / 60.0));
  const int sid = issued.detail.at("suggestion_id");

  Command acc = cmd("accept_suggestion");
  acc.suggestion_id = sid;
  const auto accepted = m.command(id, acc);
  REQUIRE(accepted.accepted);
  CHECK(accepted.events.front().kind == EventKind::Assigned);
  CHECK(accepted.events.back().kind == EventKind::SuggestionAccepted);
  CHECK_FALSE(m.command(id, acc).accepted);

  Command dec = cmd("decline_suggestion");
  dec.suggestion_id = 404;
  CHECK(code_of([&] { m.command(id, dec); }) == ErrorCode::NotFound);
}

TEST_CASE("stale suggestion is re-validated on accept") {
  SessionManager m;
  const auto id = m.create_session(contended(), manual(SessionMode::HumanPlusAI));
  Command req = cmd("request_suggestion");
  req.patient_id = 2;
  const int sid = m.command(id, req).detail.at("suggestion_id");
  REQUIRE(m.command(id, assign(1, 1)).accepted);
  Command acc = cmd("accept_suggestion");
  acc.suggestion_id = sid;
  const auto r = m.command(id, acc);
  CHECK_FALSE(r.accepted);
  CHECK(r.reason == "NoEmergencyCapacity");
  CHECK(r.detail.at("stale") == true);
  const auto snap = m.session(id)->snapshot();
  CHECK(snap.patients[1].status == PatientStatus::Unassigned);
  CHECK(snap.hospitals[0].reserved[index_of(ResourceKind::Emergency)] == 1);
}

TEST_CASE("paced AI session runs to the end on its own") {
  TempDir dir;
  SessionManager m(dir.path);
  SessionOptions o;
  o.mode = SessionMode::AIOnly;
  o.pacing = 400.0;
  const auto id = m.create_session("small", 3, o);
  m.command(id, cmd("start"));
  const auto session = m.session(id);
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(20);
  while (!session->finalized() && std::chrono::steady_clock::now() < deadline)
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  REQUIRE(session->terminal());
  CHECK(session->finalized());
  CHECK(std::filesystem::exists(dir.path / (id + ".json")));
}

TEST_CASE("end, persist and reload") {
  TempDir dir;
  SessionManager m(dir.path);
  const auto id = m.create_session("standard", 5, manual(SessionMode::HumanOnly));
  const auto sc = m.session(id)->scenario();
  m.command(id, assign(sc->patients[0].id, sc->hospitals[0].id));
  m.command(id, stepping(30));
  const auto ended = m.command(id, cmd("end"));
  CHECK(ended.detail.contains("report"));
  REQUIRE(m.session(id)->terminal());

  const ArchivedSession a = m.load_session(id);
  for (const char* key : {"session_id", "mode", "scenario", "events", "final_clock", "terminal", "report"})
    CHECK(a.record.contains(key));
  CHECK(a.record.at("mode") == "HumanOnly");
  CHECK(serialize_log(a.state.event_log) == serialize_log(m.session(id)->snapshot().event_log));

  CHECK(code_of([&] { m.load_session("s404"); }) == ErrorCode::NotFound);
  std::ofstream(dir.path / "broken.json") << "{not json";
  CHECK(code_of([&] { m.load_session("broken"); }) == ErrorCode::Storage);

  SessionManager no_archive;
  const auto other = no_archive.create_session(contended(), manual(SessionMode::HumanOnly));
  CHECK(code_of([&] { no_archive.persist(other); }) == ErrorCode::Storage);
}

TEST_CASE("concurrent commands are serialised") {
  SessionManager m;
  const auto id = m.create_session("complex", 2, manual(SessionMode::HumanPlusAI));
  const auto sc = m.session(id)->scenario();
  std::vector<std::thread> threads;
  for (int t = 0; t < 6; ++t)
    threads.emplace_back([&, t] {
      for (int i = 0; i < 10; ++i) {
        const auto& p = sc->patients[static_cast<std::size_t>((t * 10 + i) % sc->patients.size())];
        m.command(id, assign(p.id, sc->hospitals[static_cast<std::size_t>(i % sc->hospitals.size())].id));
        m.command(id, stepping(1));
        m.session(id)->state_json();
      }
    });
  for (auto& th : threads) th.join();
  const SimState s = m.session(id)->snapshot();
  CHECK(s.clock == 60);
  for (std::size_t i = 0; i < s.event_log.size(); ++i) CHECK(s.event_log[i].seq == static_cast<std::int64_t>(i));
  for (std::size_t j = 0; j < s.hospitals.size(); ++j)
    CHECK((s.hospitals[j].reserved.array() <= s.hospitals[j].effective.array()).all());
}

namespace {

struct Sse {
  std::vector<std::int64_t> ids;
  std::string raw;
};

Sse read_stream(int port, const std::string& path) {
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(30, 0);
  Sse out;
  cli.Get(path, [&](const char* data, std::size_t n) {
    out.raw.append(data, n);
    return true;
  });
  std::size_t at = 0;
  while ((at = out.raw.find("id: ", at)) != std::string::npos) {
    const auto end = out.raw.find('\n', at);
    out.ids.push_back(std::stoll(out.raw.substr(at + 4, end - at - 4)));
    at = end;
  }
  return out;
}

}  // namespace

TEST_CASE("http api") {
  TempDir dir;
  SessionManager m(dir.path);
  HttpServer server(m);
  const int port = server.start("127.0.0.1", 0);
  httplib::Client cli("127.0.0.1", port);

  auto res = cli.Get("/health");
  REQUIRE(res);
  CHECK(res->status == 200);

  res = cli.Get("/scenarios");
  REQUIRE(res);
  const auto listed = json::parse(res->body).at("scenarios");
  CHECK(std::find(listed.begin(), listed.end(), "standard") != listed.end());

  res = cli.Post("/scenarios", scenario_to_json(*contended()).dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  const std::string uploaded = json::parse(res->body).at("scenario_id");

  res = cli.Post("/sessions", json{{"scenario_id", uploaded}, {"mode", "HumanOnly"}, {"pacing", 0}}.dump(), "application/json");
  REQUIRE(res);
  REQUIRE(res->status == 201);
  const auto created = json::parse(res->body);
  const std::string sid = created.at("session_id");
  CHECK(created.at("state").at("clock") == 0);

  const std::string base = "/sessions/" + sid;
  res = cli.Post(base + "/commands", json{{"type", "assign"}, {"patient_id", 1}, {"hospital_id", 1}}.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  res = cli.Post(base + "/commands", json{{"type", "assign"}, {"patient_id", 2}, {"hospital_id", 1}}.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 409);
  CHECK(json::parse(res->body).at("code") == "rejected");
  CHECK(json::parse(res->body).at("reason") == "NoEmergencyCapacity");

  res = cli.Post(base + "/commands", json{{"type", "request_suggestion"}, {"patient_id", 2}}.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 403);
  CHECK(json::parse(res->body).at("code") == "mode_violation");

  res = cli.Post(base + "/commands", "{\"type\": \"warp\"}", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  res = cli.Post(base + "/commands", "{oops", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);

  res = cli.Get("/sessions/s999/state");
  REQUIRE(res);
  CHECK(res->status == 404);
  const auto err = json::parse(res->body);
  CHECK(err.at("code") == "not_found");
  CHECK(err.contains("reason"));

  res = cli.Get(base + "/state");
  REQUIRE(res);
  CHECK(json::parse(res->body).at("status_bar").contains("deaths"));

  res = cli.Post("/sessions", json{{"scenario_id", "small"}, {"seed", 4}, {"mode", "Sideways"}}.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);

  res = cli.Get(base + "/events?from=0&follow=0");
  REQUIRE(res);
  const auto snapshot = json::parse(res->body);
  CHECK(snapshot.at("terminal") == false);
  const auto logged = snapshot.at("events").size();
  CHECK(logged >= 3);

  // Two live subscribers while the session runs to its end.
  Sse a, b;
  std::thread ta([&] { a = read_stream(port, base + "/events?from=0"); });
  std::thread tb([&] { b = read_stream(port, base + "/events?from=0"); });
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  for (int i = 0; i < 10; ++i) {
    res = cli.Post(base + "/commands", json{{"type", "step"}, {"dt", 40}}.dump(), "application/json");
    REQUIRE(res);
  }
  ta.join();
  tb.join();
  const auto full = m.session(sid)->snapshot().event_log;
  REQUIRE(m.session(sid)->terminal());
  std::vector<std::int64_t> expected;
  for (const auto& e : full) expected.push_back(e.seq);
  CHECK(a.ids == expected);
  CHECK(b.ids == expected);
  CHECK(a.raw.find("event: SessionStarted") != std::string::npos);

  // Resuming from a cursor yields exactly the tail.
  const Sse tail = read_stream(port, base + "/events?from=5");
  CHECK(tail.ids == std::vector<std::int64_t>(expected.begin() + 5, expected.end()));

  res = cli.Get(base + "/archive");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body).at("record").at("session_id") == sid);

  res = cli.Get("/sessions");
  REQUIRE(res);
  CHECK(json::parse(res->body).at("sessions").size() == 1);

  server.stop();
}
