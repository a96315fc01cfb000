#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace poolea {

/// Maps network addresses to "10.A.B.C" client ids.
///
/// The id comes from a keyed SipHash of the address, so it cannot be
/// reversed without the key. The 24-bit id space is small enough for
/// birthday collisions, so ids already handed out in this experiment are
/// skipped by linear probing; the table holds one entry per distinct
/// client seen.
class Anonymizer {
 public:
  using Key = std::array<unsigned char, 16>;

  explicit Anonymizer(const Key& key);
  /// Key expanded deterministically from a seed.
  static Anonymizer fromSeed(std::uint64_t seed);
  /// Key drawn from the OS entropy source.
  static Anonymizer withRandomKey();

  std::string idFor(std::string_view address);

  std::size_t knownClients() const { return byAddress_.size(); }

 private:
  Key key_;
  std::unordered_map<std::string, std::string> byAddress_;
  std::unordered_set<std::uint32_t> used_;
};

}  // namespace poolea
