#pragma once

/// HTTP binding of PoolService.
///
///   GET /random  -> 200 {"chromosome":"0101..."} | 204 with no body
///   PUT /one     <- {"chromosome":"0101..."}
///                -> 200 {"size":N} | 400 {"error":"..."}
///   GET /log     -> 200 [{"t":...,"ip":"10.x.y.z","op":"PUT"|"GET","fitness":...}, ...]
///
/// Optional extras: POST /admin/reset (loopback only, when enabled) and a
/// static file mount for the browser client.

#include "poolea/pool.hpp"

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace httplib {
class Server;
struct Request;
}  // namespace httplib

namespace poolea {

struct ServerOptions {
  std::string host = "0.0.0.0";
  /// 0 picks a free port.
  int port = 8080;
  /// Identify clients by the first X-Forwarded-For entry, as behind a PaaS
  /// router. Otherwise the socket peer address is used.
  bool trustForwardedFor = false;
  bool enableAdminReset = false;
  std::optional<std::filesystem::path> staticDir;
};

class PoolServer {
 public:
  PoolServer(PoolService& service, ServerOptions options);
  ~PoolServer();

  PoolServer(const PoolServer&) = delete;
  PoolServer& operator=(const PoolServer&) = delete;

  /// Binds the socket. Returns the bound port; throws on failure.
  int bind();
  /// Serves until stop(). bind() must have succeeded.
  void serve();
  void stop();
  void waitUntilReady() const;
  int port() const { return port_; }

 private:
  std::string clientAddress(const httplib::Request& req) const;
  void installRoutes();

  PoolService& service_;
  ServerOptions options_;
  std::unique_ptr<httplib::Server> http_;
  int port_ = -1;
};

}  // namespace poolea
