#pragma once

/// Statistics over an experiment log: distinct clients, ranked PUT counts,
/// duration, and the distribution of time between PUTs.

#include "poolea/log_event.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace poolea {

class LogParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParsedLog {
  std::vector<LogEvent> events;
  std::size_t skipped = 0;
};

/// Accepts the GET /log body (a JSON array) or the persisted form (one JSON
/// object per line). Bad records are skipped and counted; more than 10% bad
/// records throws LogParseError.
ParsedLog parseLog(std::string_view raw);

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double standardError = 0.0;
  /// Number of (rank, count) points used.
  std::size_t points = 0;
};

/// OLS of log10(count) on log10(rank) over the ranks whose count exceeds 1.
/// `counts` must be sorted non-increasing. Throws FitError with < 3 points.
PowerLawFit fitPowerLaw(const std::vector<std::uint64_t>& counts);

struct ExperimentStats {
  std::size_t distinctClients = 0;
  std::size_t totalEvents = 0;
  std::size_t totalPuts = 0;
  /// Count descending, ties by clientId.
  std::vector<std::pair<std::string, std::uint64_t>> rankedPutCounts;
  double durationSeconds = 0.0;
  /// Seconds between consecutive PUTs of the same client, in log order.
  std::vector<double> intervals;
  /// Bin k holds intervals x with 10^(k/2) <= x < 10^((k+1)/2).
  std::map<int, std::uint64_t> intervalHistogram;
  std::optional<PowerLawFit> powerLaw;

  std::vector<std::uint64_t> counts() const;
  double medianIntervalSeconds() const;
  /// Share of intervals strictly below `seconds`; 0 with no intervals.
  double fractionUnder(double seconds) const;
};

/// Histogram bin of an interval. Intervals below 1 ms count as 1 ms.
int intervalBin(double seconds);

/// Throws std::invalid_argument when timestamps go backward.
ExperimentStats computeStats(const std::vector<LogEvent>& events);

/// The scalar row of summary.csv.
struct StatsSummary {
  std::size_t distinctClients = 0;
  std::size_t totalEvents = 0;
  std::size_t totalPuts = 0;
  std::size_t intervalCount = 0;
  double durationSeconds = 0.0;
  double medianIntervalSeconds = 0.0;
  double fractionUnder4s = 0.0;
  std::optional<double> powerLawSlope;
  std::optional<double> powerLawStderr;

  friend bool operator==(const StatsSummary&, const StatsSummary&) = default;
};

StatsSummary summarize(const ExperimentStats& stats);

/// Writes ranked_puts.csv, intervals.csv and summary.csv into `dir`,
/// creating it if needed. Throws std::runtime_error on I/O failure.
void exportCsv(const ExperimentStats& stats, const std::filesystem::path& dir);

StatsSummary readSummaryCsv(const std::filesystem::path& file);

}  // namespace poolea
