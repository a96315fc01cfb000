#include "poolea/pool_server.hpp"

#include "httplib.h"
#include "json.hpp"

#include <stdexcept>

namespace poolea {

namespace {

constexpr const char* kJson = "application/json";

bool isLoopback(const std::string& addr) {
  return addr == "127.0.0.1" || addr == "::1" || addr.rfind("127.", 0) == 0 ||
         addr == "::ffff:127.0.0.1";
}

void badRequest(httplib::Response& res, const std::string& message) {
  res.status = 400;
  res.set_content(nlohmann::json{{"error", message}}.dump(), kJson);
}

}  // namespace

PoolServer::PoolServer(PoolService& service, ServerOptions options)
    : service_(service), options_(std::move(options)), http_(std::make_unique<httplib::Server>()) {
  // httplib also sets SO_REUSEPORT, which lets a second server share the port silently.
  http_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  installRoutes();
}

PoolServer::~PoolServer() { stop(); }

std::string PoolServer::clientAddress(const httplib::Request& req) const {
  if (options_.trustForwardedFor && req.has_header("X-Forwarded-For")) {
    std::string forwarded = req.get_header_value("X-Forwarded-For");
    const auto comma = forwarded.find(',');
    if (comma != std::string::npos) forwarded.resize(comma);
    const auto first = forwarded.find_first_not_of(' ');
    const auto last = forwarded.find_last_not_of(' ');
    if (first != std::string::npos) return forwarded.substr(first, last - first + 1);
  }
  return req.remote_addr;
}

void PoolServer::installRoutes() {
  http_->Get("/random", [this](const httplib::Request& req, httplib::Response& res) {
    const auto picked = service_.getRandom(clientAddress(req));
    if (!picked) {
      res.status = 204;
      return;
    }
    res.set_content(nlohmann::ordered_json{{"chromosome", picked->toString()}}.dump(), kJson);
  });

  http_->Put("/one", [this](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("chromosome") ||
        !body["chromosome"].is_string()) {
      service_.noteMalformed();
      badRequest(res, "body must be {\"chromosome\": \"<bitstring>\"}");
      return;
    }
    try {
      const std::size_t size =
          service_.putOne(clientAddress(req), body["chromosome"].get<std::string>());
      res.set_content(nlohmann::ordered_json{{"size", size}}.dump(), kJson);
    } catch (const InvalidChromosome& e) {
      badRequest(res, e.what());
    }
  });

  http_->Get("/log", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(toJsonArray(service_.log()), kJson);
  });

  if (options_.enableAdminReset) {
    http_->Post("/admin/reset", [this](const httplib::Request& req, httplib::Response& res) {
      if (!isLoopback(req.remote_addr)) {
        res.status = 403;
        return;
      }
      ExperimentConfig config = service_.config();
      if (!req.body.empty()) {
        const auto body = nlohmann::json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object()) {
          badRequest(res, "reset body must be a JSON object");
          return;
        }
        try {
          config.seedCount = body.value("seedCount", config.seedCount);
          config.seed = body.value("seed", config.seed);
          if (body.contains("capacity")) {
            config.capacity = body["capacity"].is_null()
                                  ? std::nullopt
                                  : std::optional<std::size_t>(body["capacity"].get<std::size_t>());
          }
          config.spec.trapLength = body.value("trapLength", config.spec.trapLength);
          config.spec.trapCount = body.value("trapCount", config.spec.trapCount);
          service_.reset(config);
        } catch (const std::exception& e) {
          badRequest(res, e.what());
          return;
        }
      } else {
        service_.reset(config);
      }
      res.set_content(nlohmann::ordered_json{{"size", service_.poolSize()}}.dump(), kJson);
    });
  }

  if (options_.staticDir) {
    if (!http_->set_mount_point("/", options_.staticDir->string())) {
      throw std::runtime_error("static directory not found: " + options_.staticDir->string());
    }
  }
}

int PoolServer::bind() {
  if (options_.port == 0) {
    port_ = http_->bind_to_any_port(options_.host);
  } else {
    port_ = http_->bind_to_port(options_.host, options_.port) ? options_.port : -1;
  }
  if (port_ < 0) {
    throw std::runtime_error("cannot bind " + options_.host + ":" + std::to_string(options_.port));
  }
  return port_;
}

void PoolServer::serve() {
  if (port_ < 0) throw std::logic_error("PoolServer::serve before bind");
  http_->listen_after_bind();
}

void PoolServer::stop() {
  if (http_) http_->stop();
}

void PoolServer::waitUntilReady() const { http_->wait_until_ready(); }

}  // namespace poolea
