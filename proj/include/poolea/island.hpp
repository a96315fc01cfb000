#pragma once

/// A native island: the GA loop plus periodic pool migration.

#include "poolea/ga.hpp"
#include "poolea/transport.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace poolea {

struct IslandReport {
  bool solved = false;
  std::uint64_t generations = 0;
  /// populationSize + generations * (populationSize - eliteSize) + migrationsReceived.
  std::uint64_t evaluations = 0;
  std::uint64_t migrationsSent = 0;
  std::uint64_t migrationsReceived = 0;
  /// Fetched chromosomes thrown away for bad length or alphabet.
  std::uint64_t migrationsDiscarded = 0;
  double wallClockSeconds = 0.0;
  Fitness bestFitness = 0.0;
  /// Best fitness at generation 0 and after every generation.
  std::vector<std::pair<std::uint64_t, Fitness>> bestFitnessTrace;
};

nlohmann::ordered_json toJson(const IslandReport& report);

struct ExchangeResult {
  bool received = false;
  bool discarded = false;
  /// Slot the immigrant went into.
  std::optional<std::size_t> replacedIndex;
};

/// Sends the current best, then fetches one chromosome. A valid arrival
/// replaces a uniformly random member in [eliteSize, populationSize) and is
/// evaluated lazily. Randomness is only consumed when something arrives.
ExchangeResult migrateExchange(Population& pop, MigrationTransport& transport,
                               const EAParams& params, const TrapSpec& spec, Rng& rng);

class Island {
 public:
  Island(EAParams params, TrapSpec spec, std::uint64_t seed);

  /// One generation, then a migration exchange when the generation count
  /// is a multiple of migrationPeriod.
  void advance(MigrationTransport& transport);

  /// advance() until solved or out of generations.
  void runToEnd(MigrationTransport& transport);

  bool solved() const { return solved_; }
  bool finished() const;
  std::uint64_t generation() const { return pop_.generation; }
  const Population& population() const { return pop_; }
  const EAParams& params() const { return params_; }

  IslandReport report() const;

 private:
  EAParams params_;
  TrapSpec spec_;
  Rng rng_;
  Population pop_;
  bool solved_ = false;
  IslandReport stats_;
};

/// Runs an island from a fresh random population until it finds the
/// all-ones string or reaches maxGenerations. Never throws on transport
/// failure.
IslandReport runIsland(const EAParams& params, const TrapSpec& spec, MigrationTransport& transport,
                       std::uint64_t seed);

}  // namespace poolea
