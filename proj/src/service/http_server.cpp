#include "mci/service/http_server.hpp"
#include "mci/error.hpp"
#include "mci/scenario_io.hpp"

#include "httplib.h"

#include <functional>

namespace mci::service {

using nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::ModeViolation: return 403;
    case ErrorCode::Storage:
    case ErrorCode::Divergence:
    case ErrorCode::Generation: return 500;
    default: return 400;
  }
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& reason) {
  send_json(res, status, {{"code", code}, {"reason", reason}});
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

Handler guarded(Handler h) {
  return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
    try {
      h(req, res);
    } catch (const Error& e) {
      send_error(res, http_status(e.code()), to_string(e.code()), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, to_string(ErrorCode::Validation), std::string("malformed JSON: ") + e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal_error", e.what());
    }
  };
}

json body_json(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  return json::parse(req.body);
}

SessionOptions options_from(const json& body) {
  SessionOptions o;
  if (body.contains("mode")) {
    if (!body.at("mode").is_string()) throw Error(ErrorCode::Validation, "mode must be a string");
    o.mode = mode_from_string(body.at("mode").get<std::string>());
  }
  if (body.contains("pacing")) {
    if (!body.at("pacing").is_number()) throw Error(ErrorCode::Validation, "pacing must be a number");
    o.pacing = body.at("pacing").get<double>();
  }
  if (body.contains("policy")) o.policy = body.at("policy").get<std::string>();
  return o;
}

}  // namespace

HttpServer::HttpServer(SessionManager& manager) : manager_(manager), server_(std::make_unique<httplib::Server>()) {
  routes();
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::routes() {
  auto& srv = *server_;

  srv.Get("/health", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, {{"status", "ok"}}); });

  srv.Get("/scenarios", guarded([this](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, {{"scenarios", manager_.scenario_ids()}});
          }));

  srv.Post("/scenarios", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const std::string id = manager_.add_scenario(scenario_from_json(body_json(req)));
             send_json(res, 201, {{"scenario_id", id}});
           }));

  srv.Get("/sessions", guarded([this](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, {{"sessions", manager_.session_ids()}});
          }));

  srv.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const json body = body_json(req);
             const SessionOptions options = options_from(body);
             std::string id;
             if (body.contains("scenario")) {
               id = manager_.create_session(std::make_shared<const Scenario>(scenario_from_json(body.at("scenario"))),
                                            options);
             } else if (body.contains("scenario_id")) {
               id = manager_.create_session(body.at("scenario_id").get<std::string>(),
                                            body.value("seed", std::uint64_t{0}), options);
             } else {
               throw Error(ErrorCode::Validation, "request needs 'scenario_id' or an inline 'scenario'");
             }
             send_json(res, 201, {{"session_id", id}, {"state", manager_.session(id)->state_json()}});
           }));

  srv.Post(R"(/sessions/([^/]+)/commands)", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const Command command = command_from_json(body_json(req));
             const CommandResult r = manager_.command(req.matches[1], command);
             json body = command_result_to_json(r);
             if (!r.accepted) {
               body["code"] = "rejected";
               send_json(res, 409, body);
             } else {
               send_json(res, 200, body);
             }
           }));

  srv.Get(R"(/sessions/([^/]+)/state)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, manager_.session(req.matches[1])->state_json());
          }));

  srv.Post(R"(/sessions/([^/]+)/persist)", guarded([this](const httplib::Request& req, httplib::Response& res) {
             send_json(res, 200, {{"path", manager_.persist(req.matches[1]).string()}});
           }));

  srv.Get(R"(/sessions/([^/]+)/archive)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const ArchivedSession a = manager_.load_session(req.matches[1]);
            send_json(res, 200, {{"record", a.record}, {"replayed_state", state_to_json(a.state)}});
          }));

  srv.Get(R"(/sessions/([^/]+)/events)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto session = manager_.session(req.matches[1]);
            std::int64_t from = 0;
            if (req.has_param("from")) {
              try {
                from = std::stoll(req.get_param_value("from"));
              } catch (const std::exception&) {
                throw Error(ErrorCode::Validation, "from must be an integer");
              }
              if (from < 0) throw Error(ErrorCode::Validation, "from must be >= 0");
            }
            if (req.get_param_value("follow") == "0") {
              json events = json::array();
              for (const auto& e : session->events_from(from)) events.push_back(event_to_json(e));
              send_json(res, 200, {{"events", events}, {"terminal", session->terminal()}});
              return;
            }
            auto cursor = std::make_shared<std::int64_t>(from);
            res.set_header("Cache-Control", "no-cache");
            res.set_chunked_content_provider(
                "text/event-stream", [session, cursor](std::size_t, httplib::DataSink& sink) {
                  if (!sink.is_writable()) return false;
                  const auto events = session->events_from(*cursor, std::chrono::milliseconds(250));
                  std::string chunk;
                  for (const auto& e : events) {
                    chunk += "id: " + std::to_string(e.seq) + "\nevent: " + std::string(to_string(e.kind)) +
                             "\ndata: " + event_to_json(e).dump() + "\n\n";
                    *cursor = e.seq + 1;
                  }
                  if (chunk.empty() && !session->terminal()) chunk = ": keepalive\n\n";
                  if (!chunk.empty() && !sink.write(chunk.data(), chunk.size())) return false;
                  if (events.empty() && session->terminal()) sink.done();
                  return true;
                });
          }));
}

int HttpServer::start(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::Storage, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void HttpServer::listen(const std::string& host, int port) {
  if (!server_->listen(host, port)) throw Error(ErrorCode::Storage, "cannot listen on " + host + ":" + std::to_string(port));
}

void HttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace mci::service
