#include "poolea/chromosome.hpp"

#include "poolea/random.hpp"

#include <algorithm>

namespace poolea {

namespace {

constexpr std::size_t wordCount(std::size_t bits) { return (bits + 63) / 64; }

/// Mask selecting bits [lo, hi) of a word, 0 <= lo <= hi <= 64.
constexpr std::uint64_t rangeMask(std::size_t lo, std::size_t hi) {
  const std::uint64_t upper = hi == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << hi) - 1;
  const std::uint64_t lower = (std::uint64_t{1} << lo) - 1;
  return upper & ~lower;
}

}  // namespace

Chromosome::Chromosome(std::size_t length) : size_(length), words_(wordCount(length), 0) {}

Chromosome Chromosome::ones(std::size_t length) {
  Chromosome c(length);
  for (auto& w : c.words_) w = ~std::uint64_t{0};
  c.clearTail();
  return c;
}

Chromosome Chromosome::random(std::size_t length, Rng& rng) {
  Chromosome c(length);
  for (auto& w : c.words_) w = rng.next();
  c.clearTail();
  return c;
}

Chromosome Chromosome::fromBits(std::span<const std::uint8_t> bits) {
  Chromosome c(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) {
      throw InvalidChromosome("bit value outside {0,1} at position " + std::to_string(i));
    }
    if (bits[i] != 0) c.set(i, true);
  }
  return c;
}

Chromosome Chromosome::parse(std::string_view text) {
  Chromosome c(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    switch (text[i]) {
      case '0':
        break;
      case '1':
        c.set(i, true);
        break;
      default:
        throw InvalidChromosome("character outside {0,1} at position " + std::to_string(i));
    }
  }
  return c;
}

std::optional<Chromosome> Chromosome::tryParse(std::string_view text) noexcept {
  try {
    return parse(text);
  } catch (...) {
    return std::nullopt;
  }
}

void Chromosome::set(std::size_t i, bool value) {
  const std::uint64_t bit = std::uint64_t{1} << (i & 63);
  if (value) {
    words_[i >> 6] |= bit;
  } else {
    words_[i >> 6] &= ~bit;
  }
}

std::size_t Chromosome::countOnes() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(popcount64(w));
  return n;
}

std::size_t Chromosome::countOnes(std::size_t pos, std::size_t len) const {
  std::size_t n = 0;
  std::size_t end = pos + len;
  while (pos < end) {
    const std::size_t word = pos >> 6;
    const std::size_t lo = pos & 63;
    const std::size_t hi = std::min<std::size_t>(64, lo + (end - pos));
    n += static_cast<std::size_t>(popcount64(words_[word] & rangeMask(lo, hi)));
    pos += hi - lo;
  }
  return n;
}

bool Chromosome::allOnes() const {
  const std::size_t full = size_ >> 6;
  for (std::size_t i = 0; i < full; ++i) {
    if (words_[i] != ~std::uint64_t{0}) return false;
  }
  const std::size_t rem = size_ & 63;
  return rem == 0 || words_[full] == rangeMask(0, rem);
}

bool Chromosome::allOnes(std::size_t pos, std::size_t len) const {
  std::size_t end = pos + len;
  while (pos < end) {
    const std::size_t word = pos >> 6;
    const std::size_t lo = pos & 63;
    const std::size_t hi = std::min<std::size_t>(64, lo + (end - pos));
    const std::uint64_t mask = rangeMask(lo, hi);
    if ((words_[word] & mask) != mask) return false;
    pos += hi - lo;
  }
  return true;
}

void Chromosome::swapRange(Chromosome& other, std::size_t from, std::size_t to) {
  if (other.size_ != size_) {
    throw InvalidChromosome("swapRange: length mismatch");
  }
  std::size_t pos = from;
  while (pos < to) {
    const std::size_t word = pos >> 6;
    const std::size_t lo = pos & 63;
    const std::size_t hi = std::min<std::size_t>(64, lo + (to - pos));
    const std::uint64_t mask = rangeMask(lo, hi);
    const std::uint64_t diff = (words_[word] ^ other.words_[word]) & mask;
    words_[word] ^= diff;
    other.words_[word] ^= diff;
    pos += hi - lo;
  }
}

std::string Chromosome::toString() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if (test(i)) s[i] = '1';
  }
  return s;
}

std::vector<std::uint8_t> Chromosome::toBits() const {
  std::vector<std::uint8_t> bits(size_);
  for (std::size_t i = 0; i < size_; ++i) bits[i] = test(i) ? 1 : 0;
  return bits;
}

void Chromosome::clearTail() {
  if (const std::size_t rem = size_ & 63; rem != 0) {
    words_.back() &= rangeMask(0, rem);
  }
}

}  // namespace poolea
