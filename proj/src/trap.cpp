#include "poolea/trap.hpp"

#include <algorithm>
#include <span>
#include <string>
#include <vector>

namespace poolea {

namespace {

// Bit p of word i is set iff bit 64i + p starts a block.
void fillBlockStarts(std::size_t l, std::span<std::uint64_t> masks) {
  std::fill(masks.begin(), masks.end(), 0);
  for (std::size_t bit = 0; bit < masks.size() * 64; bit += l) {
    masks[bit / 64] |= std::uint64_t{1} << (bit % 64);
  }
}

constexpr std::size_t kCachedWords = 16;

// Trivially constructible so each access is a plain thread-local load.
thread_local std::size_t cachedL = 0;
thread_local std::uint64_t cachedStarts[kCachedWords];

// AND each block's bits down onto its first position, then count the block
// starts that survive. Tail bits are zero, so a block running past the end
// never counts.
template <std::size_t L>
std::size_t countFullBlocksFixed(std::span<const std::uint64_t> w, const std::uint64_t* starts) {
  std::size_t full = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const std::uint64_t next = i + 1 < w.size() ? w[i + 1] : 0;
    std::uint64_t run = w[i];
    for (std::size_t k = 1; k < L; ++k) run &= (w[i] >> k) | (next << (64 - k));
    full += static_cast<std::size_t>(popcount64(run & starts[i]));
  }
  return full;
}

std::size_t countFullBlocks(const Chromosome& c, std::size_t l, std::size_t blocks) {
  const auto w = c.words();
  if (l > 64) {
    std::size_t full = 0;
    for (std::size_t b = 0; b < blocks; ++b) full += c.allOnes(b * l, l) ? 1 : 0;
    return full;
  }
  std::vector<std::uint64_t> wide;
  const std::uint64_t* starts = cachedStarts;
  if (w.size() > kCachedWords) {
    wide.resize(w.size());
    fillBlockStarts(l, wide);
    starts = wide.data();
  } else if (cachedL != l) {
    fillBlockStarts(l, cachedStarts);
    cachedL = l;
  }
  switch (l) {
    case 2: return countFullBlocksFixed<2>(w, starts);
    case 3: return countFullBlocksFixed<3>(w, starts);
    case 4: return countFullBlocksFixed<4>(w, starts);
    case 5: return countFullBlocksFixed<5>(w, starts);
    case 6: return countFullBlocksFixed<6>(w, starts);
    case 7: return countFullBlocksFixed<7>(w, starts);
    case 8: return countFullBlocksFixed<8>(w, starts);
    default: break;
  }
  std::size_t full = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const std::uint64_t next = i + 1 < w.size() ? w[i + 1] : 0;
    std::uint64_t run = w[i];
    for (std::size_t k = 1; k < l && run; ++k) run &= (w[i] >> k) | (next << (64 - k));
    full += static_cast<std::size_t>(popcount64(run & starts[i]));
  }
  return full;
}

}  // namespace

void TrapSpec::validate() const {
  if (trapLength < 2) {
    throw std::invalid_argument("trap length must be at least 2, got " + std::to_string(trapLength));
  }
  if (trapCount < 1) {
    throw std::invalid_argument("trap count must be at least 1");
  }
}

Fitness trapValue(std::size_t ones, std::size_t trapLength) {
  if (ones == trapLength) return static_cast<Fitness>(trapLength);
  return static_cast<Fitness>(trapLength - 1 - ones);
}

Fitness trapFitness(std::span<const std::uint8_t> block, std::size_t trapLength) {
  if (block.size() != trapLength) {
    throw LengthMismatch("trap block has " + std::to_string(block.size()) + " bits, expected " +
                         std::to_string(trapLength));
  }
  std::size_t ones = 0;
  for (auto b : block) {
    if (b > 1) throw InvalidChromosome("trap block value outside {0,1}");
    ones += b;
  }
  return trapValue(ones, trapLength);
}

Fitness evaluate(const Chromosome& c, const TrapSpec& spec) {
  if (c.size() != spec.chromosomeLength()) {
    throw LengthMismatch("chromosome has " + std::to_string(c.size()) + " bits, expected " +
                         std::to_string(spec.chromosomeLength()));
  }
  // Summing l - 1 - u over every block undercounts each full block by
  // l + 1, so only the total popcount and the full blocks are needed.
  const std::size_t l = spec.trapLength;
  const std::size_t fullBlocks = countFullBlocks(c, l, spec.trapCount);
  const auto base = static_cast<Fitness>(spec.trapCount * (l - 1));
  return base - static_cast<Fitness>(c.countOnes()) + static_cast<Fitness>((l + 1) * fullBlocks);
}

bool isSolution(const Chromosome& c) { return !c.empty() && c.allOnes(); }

void checkLength(const Chromosome& c, const TrapSpec& spec) {
  if (c.size() != spec.chromosomeLength()) {
    throw InvalidChromosome("chromosome has " + std::to_string(c.size()) + " bits, expected " +
                            std::to_string(spec.chromosomeLength()));
  }
}

}  // namespace poolea
