#include "poolea/transport.hpp"

#include "poolea/pool.hpp"

namespace poolea {

void ServiceTransport::sendOne(const Chromosome& c) noexcept {
  try {
    service_.putOne(address_, c);
  } catch (...) {
  }
}

Immigrant ServiceTransport::fetchRandom() noexcept {
  try {
    return Immigrant{service_.getRandom(address_), false};
  } catch (...) {
    return {};
  }
}

BackgroundTransport::BackgroundTransport(MigrationTransport& inner)
    : inner_(inner), worker_([this] { run(); }) {}

BackgroundTransport::~BackgroundTransport() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  wake_.notify_all();
  worker_.join();
}

void BackgroundTransport::sendOne(const Chromosome& c) noexcept {
  std::lock_guard lock(mutex_);
  if (busy_ || jobQueued_) {
    ++dropped_;
    return;
  }
  try {
    pendingSend_ = c;
  } catch (...) {
    ++dropped_;
  }
}

Immigrant BackgroundTransport::fetchRandom() noexcept {
  Immigrant result;
  {
    std::lock_guard lock(mutex_);
    if (ready_) {
      result = std::move(*ready_);
      ready_.reset();
    }
    if (!busy_ && !jobQueued_) {
      jobSend_ = std::move(pendingSend_);
      pendingSend_.reset();
      jobQueued_ = true;
    }
  }
  wake_.notify_one();
  return result;
}

void BackgroundTransport::drain() {
  std::unique_lock lock(mutex_);
  idle_.wait(lock, [this] { return !busy_ && !jobQueued_; });
}

std::uint64_t BackgroundTransport::droppedSends() const {
  std::lock_guard lock(mutex_);
  return dropped_;
}

void BackgroundTransport::run() {
  std::unique_lock lock(mutex_);
  while (true) {
    wake_.wait(lock, [this] { return stopping_ || jobQueued_; });
    if (!jobQueued_) return;
    jobQueued_ = false;
    busy_ = true;
    std::optional<Chromosome> send = std::move(jobSend_);
    jobSend_.reset();
    lock.unlock();

    if (send) inner_.sendOne(*send);
    Immigrant fetched = inner_.fetchRandom();

    lock.lock();
    ready_ = std::move(fetched);
    busy_ = false;
    idle_.notify_all();
  }
}

}  // namespace poolea
