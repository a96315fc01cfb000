#pragma once

/// Seeded randomness shared by every component.
///
/// The generator is xoshiro256** seeded through SplitMix64, as its authors
/// recommend. The standard library leaves the algorithms behind
/// std::uniform_int_distribution, std::normal_distribution and std::shuffle
/// to the implementation, so all distributions here are written out
/// explicitly and a seed reproduces the same run on every platform.

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <utility>

namespace poolea {

/// SplitMix64 step. Used to derive independent stream seeds from one seed.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for sub-stream `stream` of a run seeded with `base`.
std::uint64_t deriveSeed(std::uint64_t base, std::uint64_t stream);

/// xoshiro256** (Blackman and Vigna).
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) {
    for (auto& word : s_) word = splitmix64(seed);
  }

  /// Raw state, which must not be all zero.
  static Xoshiro256 fromState(const std::array<std::uint64_t, 4>& state) {
    Xoshiro256 g(0);
    for (std::size_t i = 0; i < 4; ++i) g.s_[i] = state[i];
    return g;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

 private:
  std::uint64_t s_[4];
};

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return Xoshiro256::min(); }
  static constexpr result_type max() { return Xoshiro256::max(); }
  result_type operator()() { return engine_(); }

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) [[unlikely]] throwEmptyRange();
    // Lemire's multiply-shift with rejection; unbiased.
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) [[unlikely]] {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t between(std::int64_t lo, std::int64_t hi);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// True with probability p. p <= 0 and p >= 1 consume no randomness.
  bool bernoulli(double p);

  /// Standard normal deviate (Marsaglia polar method).
  double normal();

  double logNormal(double mu, double sigma);

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  [[noreturn]] static void throwEmptyRange();

  Xoshiro256 engine_;
  double spare_ = 0.0;
  bool hasSpare_ = false;
};

}  // namespace poolea
