// HTTP front end for SessionManager. JSON bodies throughout; errors are
// {"code", "reason"} with a matching status. The event stream is
// server-sent events at /sessions/{id}/events?from=N (add follow=0 for a
// plain JSON array of what is already logged).
#pragma once

#include "mci/error.hpp"
#include "mci/service/session_manager.hpp"

#include <memory>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace mci::service {

class HttpServer {
 public:
  explicit HttpServer(SessionManager& manager);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds (port 0 picks a free port) and serves on a background thread.
  /// Returns the bound port; throws Error(Storage) when binding fails.
  int start(const std::string& host, int port);
  /// Blocks serving on the calling thread.
  void listen(const std::string& host, int port);
  void stop();

 private:
  void routes();

  SessionManager& manager_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

/// HTTP status used for each error code.
int http_status(ErrorCode code);

}  // namespace mci::service
