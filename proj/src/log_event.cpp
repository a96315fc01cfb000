#include "poolea/log_event.hpp"

#include <cmath>

namespace poolea {

namespace {

// Integral fitness values are written without a fractional part so the
// wire form does not depend on how a client formats doubles.
nlohmann::ordered_json fitnessJson(const std::optional<double>& f) {
  if (!f) return nullptr;
  const double v = *f;
  if (std::isfinite(v) && std::floor(v) == v && std::fabs(v) < 9.007199254740992e15) {
    return static_cast<std::int64_t>(v);
  }
  return v;
}

}  // namespace

std::string_view toString(Op op) { return op == Op::Put ? "PUT" : "GET"; }

nlohmann::ordered_json toJson(const LogEvent& e) {
  nlohmann::ordered_json j;
  j["t"] = e.timestampMs;
  j["ip"] = e.clientId;
  j["op"] = toString(e.op);
  j["fitness"] = fitnessJson(e.fitness);
  return j;
}

LogEvent eventFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw MalformedEvent("log event is not an object");
  LogEvent e;
  const auto t = j.find("t");
  if (t == j.end() || !t->is_number_integer()) throw MalformedEvent("missing integer 't'");
  e.timestampMs = t->get<std::int64_t>();
  if (e.timestampMs < 0) throw MalformedEvent("negative timestamp");
  const auto ip = j.find("ip");
  if (ip == j.end() || !ip->is_string()) throw MalformedEvent("missing string 'ip'");
  e.clientId = ip->get<std::string>();
  const auto op = j.find("op");
  if (op == j.end() || !op->is_string()) throw MalformedEvent("missing string 'op'");
  const auto& opName = op->get_ref<const std::string&>();
  if (opName == "PUT") {
    e.op = Op::Put;
  } else if (opName == "GET") {
    e.op = Op::GetRandom;
  } else {
    throw MalformedEvent("unknown op '" + opName + "'");
  }
  if (const auto f = j.find("fitness"); f != j.end() && !f->is_null()) {
    if (!f->is_number()) throw MalformedEvent("'fitness' is not a number");
    e.fitness = f->get<double>();
  }
  return e;
}

std::string toJsonLine(const LogEvent& e) { return toJson(e).dump(); }

std::string toJsonArray(const std::vector<LogEvent>& events) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : events) arr.push_back(toJson(e));
  return arr.dump();
}

}  // namespace poolea
