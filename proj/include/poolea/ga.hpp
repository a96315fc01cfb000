#pragma once

/// Canonical generational GA: elitism, tournament selection, two-point
/// crossover, per-bit mutation. Every island runs exactly this loop.

#include "poolea/chromosome.hpp"
#include "poolea/random.hpp"
#include "poolea/trap.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace poolea {

struct EAParams {
  std::size_t populationSize = 256;
  std::size_t eliteSize = 2;
  std::size_t tournamentSize = 2;
  double crossoverRate = 0.9;
  /// Unset means 1 / chromosomeLength.
  std::optional<double> mutationRatePerBit;
  std::uint64_t migrationPeriod = 100;
  /// Unset means run until solved.
  std::optional<std::uint64_t> maxGenerations;

  double mutationRate(const TrapSpec& spec) const {
    return mutationRatePerBit.value_or(1.0 / static_cast<double>(spec.chromosomeLength()));
  }

  /// Throws std::invalid_argument on a violated precondition.
  void validate() const;
};

/// A chromosome plus its fitness, computed on demand and cached only here.
/// There is deliberately no fitness table shared across individuals.
class Individual {
 public:
  explicit Individual(Chromosome c) : chromosome_(std::move(c)) {}
  Individual(Chromosome c, Fitness f) : chromosome_(std::move(c)), fitness_(f) {}

  const Chromosome& chromosome() const { return chromosome_; }
  bool evaluated() const { return fitness_.has_value(); }

  /// Throws std::logic_error when not yet evaluated.
  Fitness fitness() const;

  /// Evaluates if needed. Returns true when an evaluation happened.
  bool ensureEvaluated(const TrapSpec& spec);

  /// Swaps in a new chromosome and drops the cached fitness.
  void replaceChromosome(Chromosome c);

  /// Mutable access for in-place variation; drops the cached fitness.
  Chromosome& editChromosome();

 private:
  Chromosome chromosome_;
  std::optional<Fitness> fitness_;
};

struct Population {
  std::vector<Individual> members;
  std::uint64_t generation = 0;

  std::size_t size() const { return members.size(); }
  /// Index of the fittest evaluated member; the lowest index wins ties.
  std::size_t bestIndex() const;
  Fitness bestFitness() const { return members[bestIndex()].fitness(); }
  bool hasSolution() const;
};

/// Evaluates every member lacking a fitness. Returns the number evaluated.
std::size_t evaluateAll(Population& pop, const TrapSpec& spec);

/// populationSize uniformly random chromosomes, unevaluated, generation 0.
Population newRandomPopulation(const EAParams& params, const TrapSpec& spec, Rng& rng);

/// k draws with replacement; the fittest wins, the earliest draw on ties.
const Individual& tournamentSelect(const Population& pop, std::size_t k, Rng& rng);

/// Swaps bits [min(cut1, cut2), max(cut1, cut2)) between copies of a and b.
std::pair<Chromosome, Chromosome> twoPointCrossover(const Chromosome& a, const Chromosome& b,
                                                    std::size_t cut1, std::size_t cut2);

/// With probability `rate`, two-point crossover at two distinct cut points
/// drawn from [0, length]; otherwise copies of the parents.
std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, double rate,
                                            Rng& rng);

/// Flips each bit independently with probability perBitRate.
Chromosome mutate(Chromosome c, double perBitRate, Rng& rng);

/// Two-point crossover applied to a and b in place.
void crossoverInPlace(Chromosome& a, Chromosome& b, double rate, Rng& rng);

/// Independent per-bit flips at a fixed rate over chromosomes of one length.
///
/// When few flips are expected, the flip count is drawn from
/// Binomial(length, rate) by table lookup and that many distinct positions
/// are chosen uniformly; otherwise gaps between flips are drawn from the
/// geometric law. Both have the law of one independent coin per bit.
class BitFlipMutation {
 public:
  BitFlipMutation(double rate, std::size_t length);

  void apply(Chromosome& c, Rng& rng) const;

 private:
  void applyGeometric(Chromosome& c, Rng& rng) const;

  double rate_;
  std::size_t length_;
  double logKeep_ = 0.0;
  std::vector<double> flipCountCdf_;
};

/// One generation. The eliteSize best members are copied into slots
/// [0, eliteSize) unchanged; the rest are offspring, evaluated on return.
Population stepGeneration(Population pop, const EAParams& params, const TrapSpec& spec, Rng& rng);

}  // namespace poolea
