#pragma once

/// The migration pool and the service that owns one experiment.
///
/// PoolService implements the three pool operations independent of any
/// transport: the HTTP server and the churn simulator both drive it, so the
/// simulated and served pools share one implementation.

#include "poolea/anonymizer.hpp"
#include "poolea/chromosome.hpp"
#include "poolea/log_event.hpp"
#include "poolea/random.hpp"
#include "poolea/trap.hpp"

#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string_view>
#include <vector>

namespace poolea {

/// Append-only chromosome array with optional FIFO capacity.
class Pool {
 public:
  explicit Pool(std::optional<std::size_t> capacity = std::nullopt);

  /// Appends c, evicting the oldest entry when full. Returns the new size.
  std::size_t put(Chromosome c);

  const Chromosome& at(std::size_t i) const { return entries_.at(i); }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::optional<std::size_t> capacity() const { return capacity_; }
  const std::deque<Chromosome>& entries() const { return entries_; }

 private:
  std::deque<Chromosome> entries_;
  std::optional<std::size_t> capacity_;
};

struct ExperimentConfig {
  TrapSpec spec;
  /// Random chromosomes placed in the pool at experiment start.
  std::size_t seedCount = 0;
  /// Unset means unbounded.
  std::optional<std::size_t> capacity;
  /// Drives pool seeding and GET sampling.
  std::uint64_t seed = 0;

  void validate() const;
};

using ClockMs = std::function<std::int64_t()>;

/// Wall-clock milliseconds since the Unix epoch.
std::int64_t systemClockMs();

/// Emitted under the service lock for every logged operation.
struct PoolObservation {
  LogEvent event;
  std::size_t poolSizeAfter = 0;
  /// The chromosome stored (PUT) or returned (GET), if any.
  std::optional<Chromosome> chromosome;
};

class PoolService {
 public:
  /// With a log file, every event is also appended to it as one JSON line.
  /// An existing non-empty file is archived first (see reset()).
  PoolService(ExperimentConfig config, Anonymizer anonymizer, ClockMs clock = systemClockMs,
              std::optional<std::filesystem::path> logFile = std::nullopt);

  PoolService(const PoolService&) = delete;
  PoolService& operator=(const PoolService&) = delete;

  /// A uniformly random pool member, left in place; nullopt when empty.
  /// Logged either way.
  std::optional<Chromosome> getRandom(std::string_view address);

  /// Validates and appends. Returns the pool size after insertion.
  /// Throws InvalidChromosome (and counts it) when c does not fit the spec.
  std::size_t putOne(std::string_view address, const Chromosome& c);
  /// Same, starting from the wire form.
  std::size_t putOne(std::string_view address, std::string_view bitstring);

  /// Counts a request rejected before it reached putOne (bad JSON, ...).
  void noteMalformed();

  std::vector<LogEvent> log() const;
  /// The anonymized id this experiment uses for `address`.
  std::string clientIdFor(std::string_view address);
  std::size_t logSize() const;
  std::size_t poolSize() const;
  std::vector<Chromosome> poolSnapshot() const;
  std::uint64_t malformedCount() const;
  ExperimentConfig config() const;
  std::int64_t startedAt() const;

  /// Archives the persisted log to `<logFile>.<n>` and starts a fresh
  /// experiment: new pool seeded per `config`, empty log.
  void reset(ExperimentConfig config);

  /// Paths of logs archived by reset() or at construction.
  std::vector<std::filesystem::path> archivedLogs() const;

  void setObserver(std::function<void(const PoolObservation&)> observer);

 private:
  void startExperiment(ExperimentConfig config);
  void archiveLogFile();
  LogEvent appendEvent(std::string_view address, Op op, std::optional<double> fitness);

  mutable std::shared_mutex mutex_;
  ExperimentConfig config_;
  Anonymizer anonymizer_;
  ClockMs clock_;
  std::optional<std::filesystem::path> logFile_;
  std::ofstream logStream_;
  std::vector<std::filesystem::path> archived_;

  Pool pool_;
  Rng sampler_{0};
  std::vector<LogEvent> log_;
  std::int64_t startedAt_ = 0;
  std::int64_t lastTimestamp_ = 0;
  std::uint64_t malformed_ = 0;
  std::function<void(const PoolObservation&)> observer_;
};

}  // namespace poolea
