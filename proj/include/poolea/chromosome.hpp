#pragma once

#include <boost/container/small_vector.hpp>

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace poolea {

class Rng;

/// std::popcount lowers to a libgcc call unless the target has POPCNT.
inline int popcount64(std::uint64_t x) {
#if defined(__POPCNT__)
  return std::popcount(x);
#else
  x = x - ((x >> 1) & 0x5555555555555555ULL);
  x = (x & 0x3333333333333333ULL) + ((x >> 2) & 0x3333333333333333ULL);
  x = (x + (x >> 4)) & 0x0f0f0f0f0f0f0f0fULL;
  return static_cast<int>((x * 0x0101010101010101ULL) >> 56);
#endif
}

/// Thrown for bitstrings outside the {0,1} alphabet or of the wrong length.
class InvalidChromosome : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Fixed-length binary string, packed 64 bits per word.
///
/// Bit i lives in word i / 64 at position i % 64. Bits past size() in the
/// last word are always zero, so defaulted equality compares values.
class Chromosome {
 public:
  Chromosome() = default;
  explicit Chromosome(std::size_t length);

  static Chromosome ones(std::size_t length);
  static Chromosome random(std::size_t length, Rng& rng);
  static Chromosome fromBits(std::span<const std::uint8_t> bits);

  /// Parses the wire form, one ASCII '0' or '1' per bit.
  static Chromosome parse(std::string_view text);
  static std::optional<Chromosome> tryParse(std::string_view text) noexcept;

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  bool operator[](std::size_t i) const { return test(i); }
  void set(std::size_t i, bool value);
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  std::size_t countOnes() const;
  /// Number of set bits in [pos, pos + len).
  std::size_t countOnes(std::size_t pos, std::size_t len) const;
  bool allOnes() const;
  /// True iff bits [pos, pos + len) are all set.
  bool allOnes(std::size_t pos, std::size_t len) const;

  /// Exchanges bits [from, to) with `other`. Both must have the same length.
  void swapRange(Chromosome& other, std::size_t from, std::size_t to);

  std::string toString() const;
  std::vector<std::uint8_t> toBits() const;
  std::span<const std::uint64_t> words() const { return {words_.data(), words_.size()}; }

  friend bool operator==(const Chromosome&, const Chromosome&) = default;

 private:
  void clearTail();

  // Up to 256 bits stay inline; the GA copies chromosomes every generation.
  using Words = boost::container::small_vector<std::uint64_t, 4>;

  std::size_t size_ = 0;
  Words words_;
};

}  // namespace poolea
