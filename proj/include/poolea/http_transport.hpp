#pragma once

#include "poolea/transport.hpp"

#include <chrono>
#include <memory>
#include <optional>
#include <string>

namespace httplib {
class Client;
}

namespace poolea {

/// Scheme/host/port and path prefix of a server URL such as
/// "http://host:8080/exp". A missing scheme means http.
struct ServerUrl {
  std::string origin;
  std::string pathPrefix;

  static ServerUrl parse(const std::string& url);
};

struct HttpTransportOptions {
  /// Applies to connect, read and write separately.
  std::chrono::milliseconds timeout{2000};
  /// Sent as X-Forwarded-For; lets several local islands appear as
  /// distinct hosts to a server that trusts the header.
  std::optional<std::string> forwardedFor;
};

/// Speaks the pool server's wire format.
class HttpTransport final : public MigrationTransport {
 public:
  explicit HttpTransport(const std::string& baseUrl, HttpTransportOptions options = {});
  ~HttpTransport() override;

  void sendOne(const Chromosome& c) noexcept override;
  Immigrant fetchRandom() noexcept override;

  std::uint64_t failures() const { return failures_; }

 private:
  ServerUrl url_;
  HttpTransportOptions options_;
  std::unique_ptr<httplib::Client> client_;
  std::uint64_t failures_ = 0;
};

}  // namespace poolea
