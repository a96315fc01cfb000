#pragma once

/// Fire-and-forget migration transports.
///
/// No operation may throw into the GA loop or block it beyond the
/// transport's own time budget: failures surface as an empty Immigrant or
/// a silently dropped send.

#include "poolea/chromosome.hpp"

#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

namespace poolea {

class PoolService;

/// What one fetch produced.
struct Immigrant {
  std::optional<Chromosome> chromosome;
  /// Something arrived but could not be decoded as a chromosome.
  bool malformed = false;
};

class MigrationTransport {
 public:
  virtual ~MigrationTransport() = default;
  virtual void sendOne(const Chromosome& c) noexcept = 0;
  virtual Immigrant fetchRandom() noexcept = 0;
};

/// Running alone: nothing leaves, nothing arrives.
class NullTransport final : public MigrationTransport {
 public:
  void sendOne(const Chromosome&) noexcept override {}
  Immigrant fetchRandom() noexcept override { return {}; }
};

/// Talks to an in-process PoolService as client `address`.
class ServiceTransport final : public MigrationTransport {
 public:
  ServiceTransport(PoolService& service, std::string address)
      : service_(service), address_(std::move(address)) {}

  void sendOne(const Chromosome& c) noexcept override;
  Immigrant fetchRandom() noexcept override;

 private:
  PoolService& service_;
  std::string address_;
};

/// Runs the wrapped transport on a worker thread so exchanges overlap with
/// computation. At most one exchange is in flight: a send issued while the
/// worker is busy is dropped, and fetchRandom() returns the result of the
/// previous completed fetch, if it has not been handed out yet.
class BackgroundTransport final : public MigrationTransport {
 public:
  explicit BackgroundTransport(MigrationTransport& inner);
  ~BackgroundTransport() override;

  BackgroundTransport(const BackgroundTransport&) = delete;
  BackgroundTransport& operator=(const BackgroundTransport&) = delete;

  void sendOne(const Chromosome& c) noexcept override;
  Immigrant fetchRandom() noexcept override;

  /// Blocks until the worker is idle. For tests and orderly shutdown.
  void drain();

  std::uint64_t droppedSends() const;

 private:
  void run();

  MigrationTransport& inner_;
  mutable std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable idle_;
  std::optional<Chromosome> pendingSend_;
  std::optional<Chromosome> jobSend_;
  bool jobQueued_ = false;
  bool busy_ = false;
  bool stopping_ = false;
  std::optional<Immigrant> ready_;
  std::uint64_t dropped_ = 0;
  std::thread worker_;
};

}  // namespace poolea
