#include "poolea/analyzer.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace poolea {

namespace {

bool isBlank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string formatDouble(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::vector<std::string> splitCsv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parseDouble(const std::string& s) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("bad number in summary: " + s);
  }
  return x;
}

std::size_t parseCount(const std::string& s) {
  std::size_t x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("bad count in summary: " + s);
  }
  return x;
}

std::ofstream openCsv(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::out | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

void checkWritten(std::ofstream& out, const std::filesystem::path& file) {
  out.flush();
  if (!out) throw std::runtime_error("error writing " + file.string());
}

}  // namespace

ParsedLog parseLog(std::string_view raw) {
  ParsedLog result;
  std::size_t records = 0;
  const auto first = raw.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return result;

  auto take = [&](const nlohmann::json& j) {
    ++records;
    try {
      result.events.push_back(eventFromJson(j));
    } catch (const MalformedEvent&) {
      ++result.skipped;
    }
  };

  if (raw[first] == '[') {
    nlohmann::json doc = nlohmann::json::parse(raw, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) throw LogParseError("log is not a JSON array");
    for (const auto& j : doc) take(j);
  } else {
    std::size_t pos = 0;
    while (pos <= raw.size()) {
      std::size_t end = raw.find('\n', pos);
      if (end == std::string_view::npos) end = raw.size();
      std::string_view line = raw.substr(pos, end - pos);
      pos = end + 1;
      if (isBlank(line)) continue;
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        ++records;
        ++result.skipped;
      } else {
        take(j);
      }
    }
  }
  if (result.skipped * 10 > records) {
    throw LogParseError(std::to_string(result.skipped) + " of " + std::to_string(records) +
                        " records are malformed");
  }
  return result;
}

PowerLawFit fitPowerLaw(const std::vector<std::uint64_t>& counts) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] <= 1) continue;
    xs.push_back(std::log10(static_cast<double>(i + 1)));
    ys.push_back(std::log10(static_cast<double>(counts[i])));
  }
  const std::size_t n = xs.size();
  if (n < 3) throw FitError("power-law fit needs at least 3 ranks with count > 1");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  PowerLawFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    sse += r * r;
  }
  fit.standardError = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  return fit;
}

int intervalBin(double seconds) {
  const double x = std::max(seconds, 0.001);
  int k = static_cast<int>(std::floor(2.0 * std::log10(x)));
  // log10 can land a hair off at exact bin edges.
  while (std::pow(10.0, (k + 1) / 2.0) <= x) ++k;
  while (std::pow(10.0, k / 2.0) > x) --k;
  return k;
}

std::vector<std::uint64_t> ExperimentStats::counts() const {
  std::vector<std::uint64_t> c;
  c.reserve(rankedPutCounts.size());
  for (const auto& [id, n] : rankedPutCounts) c.push_back(n);
  return c;
}

double ExperimentStats::medianIntervalSeconds() const {
  if (intervals.empty()) return 0.0;
  std::vector<double> sorted = intervals;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  return n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

double ExperimentStats::fractionUnder(double seconds) const {
  if (intervals.empty()) return 0.0;
  const auto under = std::count_if(intervals.begin(), intervals.end(),
                                   [seconds](double x) { return x < seconds; });
  return static_cast<double>(under) / static_cast<double>(intervals.size());
}

ExperimentStats computeStats(const std::vector<LogEvent>& events) {
  ExperimentStats stats;
  stats.totalEvents = events.size();
  std::unordered_map<std::string, std::uint64_t> puts;
  std::unordered_map<std::string, std::int64_t> lastPut;
  std::unordered_map<std::string, bool> seen;
  std::optional<std::int64_t> firstPutAt, lastPutAt;
  std::int64_t previous = events.empty() ? 0 : events.front().timestampMs;

  for (const auto& e : events) {
    if (e.timestampMs < previous) throw std::invalid_argument("log events are not time-ordered");
    previous = e.timestampMs;
    seen[e.clientId] = true;
    if (e.op != Op::Put) continue;
    ++stats.totalPuts;
    ++puts[e.clientId];
    if (!firstPutAt) firstPutAt = e.timestampMs;
    lastPutAt = e.timestampMs;
    auto it = lastPut.find(e.clientId);
    if (it != lastPut.end()) {
      const double gap = static_cast<double>(e.timestampMs - it->second) / 1000.0;
      stats.intervals.push_back(gap);
      ++stats.intervalHistogram[intervalBin(gap)];
      it->second = e.timestampMs;
    } else {
      lastPut.emplace(e.clientId, e.timestampMs);
    }
  }

  stats.distinctClients = seen.size();
  stats.rankedPutCounts.assign(puts.begin(), puts.end());
  std::sort(stats.rankedPutCounts.begin(), stats.rankedPutCounts.end(),
            [](const auto& a, const auto& b) {
              return a.second != b.second ? a.second > b.second : a.first < b.first;
            });
  if (firstPutAt) stats.durationSeconds = static_cast<double>(*lastPutAt - *firstPutAt) / 1000.0;
  try {
    stats.powerLaw = fitPowerLaw(stats.counts());
  } catch (const FitError&) {
  }
  return stats;
}

StatsSummary summarize(const ExperimentStats& stats) {
  StatsSummary s;
  s.distinctClients = stats.distinctClients;
  s.totalEvents = stats.totalEvents;
  s.totalPuts = stats.totalPuts;
  s.intervalCount = stats.intervals.size();
  s.durationSeconds = stats.durationSeconds;
  s.medianIntervalSeconds = stats.medianIntervalSeconds();
  s.fractionUnder4s = stats.fractionUnder(4.0);
  if (stats.powerLaw) {
    s.powerLawSlope = stats.powerLaw->slope;
    s.powerLawStderr = stats.powerLaw->standardError;
  }
  return s;
}

namespace {

constexpr const char* kSummaryHeader =
    "distinct_clients,total_events,total_puts,interval_count,duration_seconds,"
    "median_interval_seconds,fraction_under_4s,power_law_slope,power_law_stderr";

}  // namespace

void exportCsv(const ExperimentStats& stats, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  {
    const auto file = dir / "ranked_puts.csv";
    auto out = openCsv(file);
    out << "rank,clientId,count\n";
    std::size_t rank = 1;
    for (const auto& [id, n] : stats.rankedPutCounts) out << rank++ << ',' << id << ',' << n << '\n';
    checkWritten(out, file);
  }
  {
    const auto file = dir / "intervals.csv";
    auto out = openCsv(file);
    out << "log10_bin_low,count\n";
    for (const auto& [k, n] : stats.intervalHistogram) {
      out << formatDouble(k / 2.0) << ',' << n << '\n';
    }
    checkWritten(out, file);
  }
  {
    const auto file = dir / "summary.csv";
    auto out = openCsv(file);
    const StatsSummary s = summarize(stats);
    out << kSummaryHeader << '\n';
    out << s.distinctClients << ',' << s.totalEvents << ',' << s.totalPuts << ','
        << s.intervalCount << ',' << formatDouble(s.durationSeconds) << ','
        << formatDouble(s.medianIntervalSeconds) << ',' << formatDouble(s.fractionUnder4s) << ','
        << (s.powerLawSlope ? formatDouble(*s.powerLawSlope) : "") << ','
        << (s.powerLawStderr ? formatDouble(*s.powerLawStderr) : "") << '\n';
    checkWritten(out, file);
  }
}

StatsSummary readSummaryCsv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  if (header != kSummaryHeader) throw std::runtime_error("unexpected summary header");
  const auto cells = splitCsv(row);
  if (cells.size() != 9) throw std::runtime_error("summary row has wrong column count");
  StatsSummary s;
  s.distinctClients = parseCount(cells[0]);
  s.totalEvents = parseCount(cells[1]);
  s.totalPuts = parseCount(cells[2]);
  s.intervalCount = parseCount(cells[3]);
  s.durationSeconds = parseDouble(cells[4]);
  s.medianIntervalSeconds = parseDouble(cells[5]);
  s.fractionUnder4s = parseDouble(cells[6]);
  if (!cells[7].empty()) s.powerLawSlope = parseDouble(cells[7]);
  if (!cells[8].empty()) s.powerLawStderr = parseDouble(cells[8]);
  return s;
}

}  // namespace poolea
