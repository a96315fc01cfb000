#include "poolea/island.hpp"

#include <chrono>

namespace poolea {

nlohmann::ordered_json toJson(const IslandReport& report) {
  nlohmann::ordered_json j;
  j["solved"] = report.solved;
  j["generations"] = report.generations;
  j["evaluations"] = report.evaluations;
  j["migrationsSent"] = report.migrationsSent;
  j["migrationsReceived"] = report.migrationsReceived;
  j["migrationsDiscarded"] = report.migrationsDiscarded;
  j["wallClock"] = report.wallClockSeconds;
  j["bestFitness"] = report.bestFitness;
  auto trace = nlohmann::ordered_json::array();
  for (const auto& [gen, fit] : report.bestFitnessTrace) trace.push_back({gen, fit});
  j["bestFitnessTrace"] = std::move(trace);
  return j;
}

ExchangeResult migrateExchange(Population& pop, MigrationTransport& transport,
                               const EAParams& params, const TrapSpec& spec, Rng& rng) {
  ExchangeResult result;
  transport.sendOne(pop.members[pop.bestIndex()].chromosome());
  Immigrant arrival = transport.fetchRandom();
  if (arrival.malformed) {
    result.discarded = true;
    return result;
  }
  if (!arrival.chromosome) return result;
  if (arrival.chromosome->size() != spec.chromosomeLength()) {
    result.discarded = true;
    return result;
  }
  const std::size_t elite = std::min(params.eliteSize, pop.size() - 1);
  const std::size_t slot = elite + static_cast<std::size_t>(rng.below(pop.size() - elite));
  pop.members[slot].replaceChromosome(std::move(*arrival.chromosome));
  result.received = true;
  result.replacedIndex = slot;
  return result;
}

Island::Island(EAParams params, TrapSpec spec, std::uint64_t seed)
    : params_(std::move(params)), spec_(spec), rng_(seed) {
  params_.validate();
  spec_.validate();
  pop_ = newRandomPopulation(params_, spec_, rng_);
  stats_.evaluations += evaluateAll(pop_, spec_);
  stats_.bestFitnessTrace.emplace_back(0, pop_.bestFitness());
  solved_ = pop_.hasSolution();
}

bool Island::finished() const {
  return solved_ || (params_.maxGenerations && pop_.generation >= *params_.maxGenerations);
}

void Island::advance(MigrationTransport& transport) {
  // Immigrants from the last exchange are evaluated here.
  stats_.evaluations += evaluateAll(pop_, spec_);
  pop_ = stepGeneration(std::move(pop_), params_, spec_, rng_);
  stats_.evaluations += pop_.size() - std::min(params_.eliteSize, pop_.size());
  stats_.bestFitnessTrace.emplace_back(pop_.generation, pop_.bestFitness());

  if (pop_.generation % params_.migrationPeriod == 0) {
    const ExchangeResult exchange = migrateExchange(pop_, transport, params_, spec_, rng_);
    ++stats_.migrationsSent;
    if (exchange.received) ++stats_.migrationsReceived;
    if (exchange.discarded) ++stats_.migrationsDiscarded;
  }
  solved_ = pop_.hasSolution();
  if (finished()) stats_.evaluations += evaluateAll(pop_, spec_);
}

void Island::runToEnd(MigrationTransport& transport) {
  while (!finished()) advance(transport);
}

IslandReport Island::report() const {
  IslandReport r = stats_;
  r.solved = solved_;
  r.generations = pop_.generation;
  bool allEvaluated = true;
  for (const auto& m : pop_.members) allEvaluated = allEvaluated && m.evaluated();
  r.bestFitness = allEvaluated ? pop_.bestFitness() : stats_.bestFitnessTrace.back().second;
  return r;
}

IslandReport runIsland(const EAParams& params, const TrapSpec& spec, MigrationTransport& transport,
                       std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  Island island(params, spec, seed);
  island.runToEnd(transport);
  IslandReport report = island.report();
  report.wallClockSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace poolea
