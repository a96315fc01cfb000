#pragma once

/// One line of the experiment log, as served by GET /log and persisted as
/// newline-delimited JSON:
///
///     {"t":1420070400123,"ip":"10.17.3.201","op":"PUT","fitness":117}
///
/// `op` is "PUT" or "GET"; `fitness` is null for a GET on an empty pool.

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace poolea {

enum class Op { Put, GetRandom };

std::string_view toString(Op op);

struct LogEvent {
  std::int64_t timestampMs = 0;
  std::string clientId;
  Op op = Op::Put;
  std::optional<double> fitness;

  friend bool operator==(const LogEvent&, const LogEvent&) = default;
};

class MalformedEvent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::ordered_json toJson(const LogEvent& e);

/// Throws MalformedEvent when a field is missing or has the wrong type.
LogEvent eventFromJson(const nlohmann::json& j);

/// Compact single-line JSON, no trailing newline.
std::string toJsonLine(const LogEvent& e);

/// The GET /log body: a JSON array of events.
std::string toJsonArray(const std::vector<LogEvent>& events);

}  // namespace poolea
