#include "poolea/pool.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace poolea {

Pool::Pool(std::optional<std::size_t> capacity) : capacity_(capacity) {
  if (capacity_ && *capacity_ == 0) throw std::invalid_argument("pool capacity must be positive");
}

std::size_t Pool::put(Chromosome c) {
  if (capacity_ && entries_.size() >= *capacity_) entries_.pop_front();
  entries_.push_back(std::move(c));
  return entries_.size();
}

void ExperimentConfig::validate() const {
  spec.validate();
  if (capacity && *capacity == 0) throw std::invalid_argument("pool capacity must be positive");
  if (capacity && seedCount > *capacity) {
    throw std::invalid_argument("seed count exceeds pool capacity");
  }
}

std::int64_t systemClockMs() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

PoolService::PoolService(ExperimentConfig config, Anonymizer anonymizer, ClockMs clock,
                         std::optional<std::filesystem::path> logFile)
    : anonymizer_(std::move(anonymizer)), clock_(std::move(clock)), logFile_(std::move(logFile)) {
  config.validate();
  archiveLogFile();
  startExperiment(std::move(config));
}

void PoolService::startExperiment(ExperimentConfig config) {
  config_ = std::move(config);
  pool_ = Pool(config_.capacity);
  Rng seeder(deriveSeed(config_.seed, 1));
  for (std::size_t i = 0; i < config_.seedCount; ++i) {
    pool_.put(Chromosome::random(config_.spec.chromosomeLength(), seeder));
  }
  sampler_ = Rng(deriveSeed(config_.seed, 2));
  log_.clear();
  malformed_ = 0;
  startedAt_ = std::max(clock_(), lastTimestamp_);
  lastTimestamp_ = startedAt_;
  if (logFile_) {
    if (logFile_->has_parent_path()) std::filesystem::create_directories(logFile_->parent_path());
    logStream_ = std::ofstream(*logFile_, std::ios::out | std::ios::trunc);
    if (!logStream_) throw std::runtime_error("cannot open log file " + logFile_->string());
  }
}

void PoolService::archiveLogFile() {
  if (!logFile_) return;
  if (logStream_.is_open()) logStream_.close();
  std::error_code ec;
  if (!std::filesystem::exists(*logFile_, ec) || std::filesystem::file_size(*logFile_, ec) == 0) {
    return;
  }
  for (std::size_t n = 1;; ++n) {
    std::filesystem::path target = *logFile_;
    target += "." + std::to_string(n);
    if (!std::filesystem::exists(target)) {
      std::filesystem::rename(*logFile_, target);
      archived_.push_back(target);
      return;
    }
  }
}

LogEvent PoolService::appendEvent(std::string_view address, Op op, std::optional<double> fitness) {
  LogEvent e;
  e.timestampMs = std::max(clock_(), lastTimestamp_);
  lastTimestamp_ = e.timestampMs;
  e.clientId = anonymizer_.idFor(address);
  e.op = op;
  e.fitness = fitness;
  log_.push_back(e);
  if (logStream_.is_open()) {
    logStream_ << toJsonLine(e) << '\n';
    logStream_.flush();
  }
  return e;
}

std::optional<Chromosome> PoolService::getRandom(std::string_view address) {
  std::unique_lock lock(mutex_);
  std::optional<Chromosome> picked;
  std::optional<double> fitness;
  if (!pool_.empty()) {
    picked = pool_.at(static_cast<std::size_t>(sampler_.below(pool_.size())));
    fitness = evaluate(*picked, config_.spec);
  }
  LogEvent e = appendEvent(address, Op::GetRandom, fitness);
  if (observer_) observer_(PoolObservation{std::move(e), pool_.size(), picked});
  return picked;
}

std::size_t PoolService::putOne(std::string_view address, const Chromosome& c) {
  std::unique_lock lock(mutex_);
  if (c.size() != config_.spec.chromosomeLength()) {
    ++malformed_;
    throw InvalidChromosome("chromosome has " + std::to_string(c.size()) + " bits, expected " +
                            std::to_string(config_.spec.chromosomeLength()));
  }
  const double fitness = evaluate(c, config_.spec);
  const std::size_t size = pool_.put(c);
  LogEvent e = appendEvent(address, Op::Put, fitness);
  if (observer_) observer_(PoolObservation{std::move(e), size, c});
  return size;
}

std::size_t PoolService::putOne(std::string_view address, std::string_view bitstring) {
  std::optional<Chromosome> c = Chromosome::tryParse(bitstring);
  if (!c) {
    noteMalformed();
    throw InvalidChromosome("chromosome must be a string over {0,1}");
  }
  return putOne(address, *c);
}

void PoolService::noteMalformed() {
  std::unique_lock lock(mutex_);
  ++malformed_;
}

std::vector<LogEvent> PoolService::log() const {
  std::shared_lock lock(mutex_);
  return log_;
}

std::string PoolService::clientIdFor(std::string_view address) {
  std::unique_lock lock(mutex_);
  return anonymizer_.idFor(address);
}

std::size_t PoolService::logSize() const {
  std::shared_lock lock(mutex_);
  return log_.size();
}

std::size_t PoolService::poolSize() const {
  std::shared_lock lock(mutex_);
  return pool_.size();
}

std::vector<Chromosome> PoolService::poolSnapshot() const {
  std::shared_lock lock(mutex_);
  return {pool_.entries().begin(), pool_.entries().end()};
}

std::uint64_t PoolService::malformedCount() const {
  std::shared_lock lock(mutex_);
  return malformed_;
}

ExperimentConfig PoolService::config() const {
  std::shared_lock lock(mutex_);
  return config_;
}

std::int64_t PoolService::startedAt() const {
  std::shared_lock lock(mutex_);
  return startedAt_;
}

void PoolService::reset(ExperimentConfig config) {
  config.validate();
  std::unique_lock lock(mutex_);
  archiveLogFile();
  startExperiment(std::move(config));
}

std::vector<std::filesystem::path> PoolService::archivedLogs() const {
  std::shared_lock lock(mutex_);
  return archived_;
}

void PoolService::setObserver(std::function<void(const PoolObservation&)> observer) {
  std::unique_lock lock(mutex_);
  observer_ = std::move(observer);
}

}  // namespace poolea
