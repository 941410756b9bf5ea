#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "ontolink/session.hpp"

namespace httplib {
class Server;
}

namespace ontolink {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> static_dir;
};

// JSON endpoints over a Session:
//   GET  /stats, /nodes?q=&offset=&limit=, /candidates?kind=&k=&nodes=,
//        /explain/local?u=&v=&bins=, /explain/global?top=, /journal
//   POST /feedback {"accept":[{"u","v"}], "reject":[...]}, /reembed
// Errors are {"error": {"code", "message", "details"?}}.
class Server {
 public:
  Server(Session& session, ServerOptions options);
  ~Server();

  // Binds and returns the bound port; throws Error if binding fails.
  int bind();
  // Blocks until stop().
  void serve();
  void stop();

 private:
  Session& session_;
  ServerOptions options_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace ontolink
