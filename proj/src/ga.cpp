#include "poolea/ga.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace poolea {

void EAParams::validate() const {
  if (populationSize == 0) throw std::invalid_argument("population size must be positive");
  if (eliteSize >= populationSize) {
    throw std::invalid_argument("elite size must be smaller than population size");
  }
  if (tournamentSize == 0 || tournamentSize > populationSize) {
    throw std::invalid_argument("tournament size must be in [1, population size]");
  }
  auto probability = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument(std::string(what) + " must be in [0, 1]");
    }
  };
  probability(crossoverRate, "crossover rate");
  if (mutationRatePerBit) probability(*mutationRatePerBit, "mutation rate");
  if (migrationPeriod == 0) throw std::invalid_argument("migration period must be positive");
  if (maxGenerations && *maxGenerations == 0) {
    throw std::invalid_argument("max generations must be positive");
  }
}

Fitness Individual::fitness() const {
  if (!fitness_) throw std::logic_error("individual has not been evaluated");
  return *fitness_;
}

bool Individual::ensureEvaluated(const TrapSpec& spec) {
  if (fitness_) return false;
  fitness_ = evaluate(chromosome_, spec);
  return true;
}

void Individual::replaceChromosome(Chromosome c) {
  chromosome_ = std::move(c);
  fitness_.reset();
}

Chromosome& Individual::editChromosome() {
  fitness_.reset();
  return chromosome_;
}

std::size_t Population::bestIndex() const {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!members[i].evaluated()) continue;
    if (!best || members[i].fitness() > members[*best].fitness()) best = i;
  }
  if (!best) throw std::logic_error("no evaluated member");
  return *best;
}

bool Population::hasSolution() const {
  return std::any_of(members.begin(), members.end(),
                     [](const Individual& ind) { return isSolution(ind.chromosome()); });
}

std::size_t evaluateAll(Population& pop, const TrapSpec& spec) {
  std::size_t n = 0;
  for (auto& ind : pop.members) {
    if (ind.ensureEvaluated(spec)) ++n;
  }
  return n;
}

Population newRandomPopulation(const EAParams& params, const TrapSpec& spec, Rng& rng) {
  Population pop;
  pop.members.reserve(params.populationSize);
  for (std::size_t i = 0; i < params.populationSize; ++i) {
    pop.members.emplace_back(Chromosome::random(spec.chromosomeLength(), rng));
  }
  return pop;
}

const Individual& tournamentSelect(const Population& pop, std::size_t k, Rng& rng) {
  if (k == 0 || k > pop.size()) {
    throw std::invalid_argument("tournament size must be in [1, population size]");
  }
  const Individual* winner = &pop.members[rng.below(pop.size())];
  for (std::size_t i = 1; i < k; ++i) {
    const Individual& challenger = pop.members[rng.below(pop.size())];
    if (challenger.fitness() > winner->fitness()) winner = &challenger;
  }
  return *winner;
}

std::pair<Chromosome, Chromosome> twoPointCrossover(const Chromosome& a, const Chromosome& b,
                                                    std::size_t cut1, std::size_t cut2) {
  if (a.size() != b.size()) throw LengthMismatch("crossover parents differ in length");
  const auto [lo, hi] = std::minmax(cut1, cut2);
  if (hi > a.size()) throw std::out_of_range("crossover cut point past chromosome end");
  std::pair<Chromosome, Chromosome> children{a, b};
  children.first.swapRange(children.second, lo, hi);
  return children;
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, double rate,
                                            Rng& rng) {
  std::pair<Chromosome, Chromosome> children{a, b};
  crossoverInPlace(children.first, children.second, rate, rng);
  return children;
}

void crossoverInPlace(Chromosome& a, Chromosome& b, double rate, Rng& rng) {
  if (a.size() != b.size()) throw LengthMismatch("crossover parents differ in length");
  if (!rng.bernoulli(rate) || a.size() == 0) return;
  const std::uint64_t points = a.size() + 1;
  const auto cut1 = static_cast<std::size_t>(rng.below(points));
  // Second cut drawn from the remaining points so the two are distinct.
  auto cut2 = static_cast<std::size_t>(rng.below(points - 1));
  if (cut2 >= cut1) ++cut2;
  const auto [lo, hi] = std::minmax(cut1, cut2);
  a.swapRange(b, lo, hi);
}

Chromosome mutate(Chromosome c, double perBitRate, Rng& rng) {
  BitFlipMutation(perBitRate, c.size()).apply(c, rng);
  return c;
}

BitFlipMutation::BitFlipMutation(double rate, std::size_t length) : rate_(rate), length_(length) {
  if (rate_ <= 0.0 || rate_ >= 1.0 || length_ == 0) return;
  logKeep_ = std::log1p(-rate_);
  const double n = static_cast<double>(length_);
  if (n * rate_ > 8.0) return;
  // P(K = 0) = (1 - p)^n, then P(K = k + 1) = P(K = k) (n - k) / (k + 1) p / (1 - p).
  double pmf = std::exp(n * logKeep_);
  double cdf = pmf;
  const double odds = rate_ / (1.0 - rate_);
  flipCountCdf_.push_back(cdf);
  for (std::size_t k = 0; k < length_ && cdf < 1.0 - 1e-15; ++k) {
    pmf *= static_cast<double>(length_ - k) / static_cast<double>(k + 1) * odds;
    cdf += pmf;
    flipCountCdf_.push_back(cdf);
  }
}

void BitFlipMutation::apply(Chromosome& c, Rng& rng) const {
  if (c.size() != length_) throw LengthMismatch("mutation built for a different length");
  if (rate_ <= 0.0 || length_ == 0) return;
  if (rate_ >= 1.0) {
    for (std::size_t i = 0; i < length_; ++i) c.flip(i);
    return;
  }
  if (flipCountCdf_.empty()) {
    applyGeometric(c, rng);
    return;
  }
  const double u = rng.uniform();
  std::size_t flips = 0;
  while (flips + 1 < flipCountCdf_.size() && u >= flipCountCdf_[flips]) ++flips;
  // Floyd's sampling of `flips` distinct positions out of length_.
  boost::container::small_vector<std::size_t, 16> chosen;
  for (std::size_t j = length_ - flips; j < length_; ++j) {
    auto t = static_cast<std::size_t>(rng.below(j + 1));
    if (std::find(chosen.begin(), chosen.end(), t) != chosen.end()) t = j;
    chosen.push_back(t);
    c.flip(t);
  }
}

void BitFlipMutation::applyGeometric(Chromosome& c, Rng& rng) const {
  std::size_t pos = 0;
  while (true) {
    const double gap = std::floor(std::log(1.0 - rng.uniform()) / logKeep_);
    if (gap >= static_cast<double>(length_ - pos)) break;
    pos += static_cast<std::size_t>(gap);
    c.flip(pos);
    if (++pos >= length_) break;
  }
}

Population stepGeneration(Population pop, const EAParams& params, const TrapSpec& spec,
                          Rng& rng) {
  evaluateAll(pop, spec);
  const std::size_t size = pop.size();
  const std::size_t elite = std::min(params.eliteSize, size);

  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(elite), order.end(),
                    [&](std::size_t x, std::size_t y) {
                      const Fitness fx = pop.members[x].fitness();
                      const Fitness fy = pop.members[y].fitness();
                      return fx > fy || (fx == fy && x < y);
                    });

  Population next;
  next.generation = pop.generation + 1;
  next.members.reserve(size);
  for (std::size_t i = 0; i < elite; ++i) next.members.push_back(pop.members[order[i]]);

  const BitFlipMutation mutation(params.mutationRate(spec), spec.chromosomeLength());
  while (next.members.size() < size) {
    const Individual& mother = tournamentSelect(pop, params.tournamentSize, rng);
    const Individual& father = tournamentSelect(pop, params.tournamentSize, rng);
    Chromosome& first = next.members.emplace_back(mother.chromosome()).editChromosome();
    if (next.members.size() < size) {
      Chromosome& second = next.members.emplace_back(father.chromosome()).editChromosome();
      // `first` stays valid: capacity was reserved up front.
      crossoverInPlace(first, second, params.crossoverRate, rng);
      mutation.apply(first, rng);
      mutation.apply(second, rng);
    } else {
      Chromosome spare = father.chromosome();
      crossoverInPlace(first, spare, params.crossoverRate, rng);
      mutation.apply(first, rng);
    }
  }
  evaluateAll(next, spec);
  return next;
}

}  // namespace poolea
