#include "poolea/http_transport.hpp"

#include "httplib.h"
#include "json.hpp"

namespace poolea {

ServerUrl ServerUrl::parse(const std::string& url) {
  std::string rest = url;
  std::string scheme = "http://";
  if (const auto pos = rest.find("://"); pos != std::string::npos) {
    scheme = rest.substr(0, pos + 3);
    rest = rest.substr(pos + 3);
  }
  ServerUrl out;
  const auto slash = rest.find('/');
  out.origin = scheme + rest.substr(0, slash);
  if (slash != std::string::npos) {
    out.pathPrefix = rest.substr(slash);
    while (!out.pathPrefix.empty() && out.pathPrefix.back() == '/') out.pathPrefix.pop_back();
  }
  return out;
}

HttpTransport::HttpTransport(const std::string& baseUrl, HttpTransportOptions options)
    : url_(ServerUrl::parse(baseUrl)), options_(std::move(options)) {
  client_ = std::make_unique<httplib::Client>(url_.origin);
  client_->set_connection_timeout(options_.timeout);
  client_->set_read_timeout(options_.timeout);
  client_->set_write_timeout(options_.timeout);
  client_->set_keep_alive(true);
}

HttpTransport::~HttpTransport() = default;

void HttpTransport::sendOne(const Chromosome& c) noexcept {
  try {
    httplib::Headers headers;
    if (options_.forwardedFor) headers.emplace("X-Forwarded-For", *options_.forwardedFor);
    const std::string body = nlohmann::ordered_json{{"chromosome", c.toString()}}.dump();
    auto res = client_->Put(url_.pathPrefix + "/one", headers, body, "application/json");
    if (!res || res->status != 200) ++failures_;
  } catch (...) {
    ++failures_;
  }
}

Immigrant HttpTransport::fetchRandom() noexcept {
  try {
    httplib::Headers headers;
    if (options_.forwardedFor) headers.emplace("X-Forwarded-For", *options_.forwardedFor);
    auto res = client_->Get(url_.pathPrefix + "/random", headers);
    if (!res) {
      ++failures_;
      return {};
    }
    if (res->status == 204) return {};
    if (res->status != 200) {
      ++failures_;
      return {};
    }
    const auto body = nlohmann::json::parse(res->body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("chromosome") ||
        !body["chromosome"].is_string()) {
      return Immigrant{std::nullopt, true};
    }
    auto c = Chromosome::tryParse(body["chromosome"].get_ref<const std::string&>());
    if (!c) return Immigrant{std::nullopt, true};
    return Immigrant{std::move(c), false};
  } catch (...) {
    ++failures_;
    return {};
  }
}

}  // namespace poolea
