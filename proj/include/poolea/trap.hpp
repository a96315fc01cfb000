#pragma once

/// Concatenated deceptive trap functions.
///
/// A block of `trapLength` bits with u ones scores
///
///     f(u) = l          if u == l
///     f(u) = l - 1 - u  otherwise
///
/// so all-zeros (l - 1) is a local optimum that draws the search away from
/// the unique global optimum at all-ones (l). A chromosome is trapCount
/// consecutive, non-overlapping blocks and its fitness is the block sum.

#include "poolea/chromosome.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace poolea {

using Fitness = double;

class LengthMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TrapSpec {
  std::size_t trapLength = 4;
  std::size_t trapCount = 40;

  std::size_t chromosomeLength() const { return trapLength * trapCount; }
  Fitness optimum() const { return static_cast<Fitness>(chromosomeLength()); }

  /// Throws std::invalid_argument unless trapLength >= 2 and trapCount >= 1.
  void validate() const;

  friend bool operator==(const TrapSpec&, const TrapSpec&) = default;
};

/// Trap value of a block holding `ones` set bits out of `trapLength`.
Fitness trapValue(std::size_t ones, std::size_t trapLength);

/// Trap value of a single block given as 0/1 values.
Fitness trapFitness(std::span<const std::uint8_t> block, std::size_t trapLength);

Fitness evaluate(const Chromosome& c, const TrapSpec& spec);

/// True iff every bit is set.
bool isSolution(const Chromosome& c);

/// Throws InvalidChromosome unless c has the spec's length.
void checkLength(const Chromosome& c, const TrapSpec& spec);

}  // namespace poolea
