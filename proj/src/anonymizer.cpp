#include "poolea/anonymizer.hpp"

#include "poolea/random.hpp"

#include <sodium.h>

#include <stdexcept>

namespace poolea {

namespace {

void ensureSodium() {
  static const int status = sodium_init();
  if (status < 0) throw std::runtime_error("libsodium initialization failed");
}

std::string format(std::uint32_t v) {
  return "10." + std::to_string((v >> 16) & 0xff) + "." + std::to_string((v >> 8) & 0xff) + "." +
         std::to_string(v & 0xff);
}

}  // namespace

Anonymizer::Anonymizer(const Key& key) : key_(key) {
  static_assert(sizeof(Key) == crypto_shorthash_KEYBYTES);
  ensureSodium();
}

Anonymizer Anonymizer::fromSeed(std::uint64_t seed) {
  Key key{};
  std::uint64_t state = seed;
  for (std::size_t i = 0; i < key.size(); i += 8) {
    std::uint64_t word = splitmix64(state);
    for (std::size_t b = 0; b < 8; ++b) {
      key[i + b] = static_cast<unsigned char>(word & 0xff);
      word >>= 8;
    }
  }
  return Anonymizer(key);
}

Anonymizer Anonymizer::withRandomKey() {
  ensureSodium();
  Key key{};
  crypto_shorthash_keygen(key.data());
  return Anonymizer(key);
}

std::string Anonymizer::idFor(std::string_view address) {
  std::string addr(address);
  if (const auto it = byAddress_.find(addr); it != byAddress_.end()) return it->second;

  std::array<unsigned char, crypto_shorthash_BYTES> digest{};
  crypto_shorthash(digest.data(), reinterpret_cast<const unsigned char*>(addr.data()),
                   addr.size(), key_.data());
  std::uint32_t v = (std::uint32_t{digest[0]} << 16) | (std::uint32_t{digest[1]} << 8) | digest[2];
  std::string id = format(v);
  // Never hand back the caller's own address, and never reuse an id.
  while (used_.count(v) != 0 || id == addr) {
    v = (v + 1) & 0xffffff;
    id = format(v);
  }
  used_.insert(v);
  byAddress_.emplace(std::move(addr), id);
  return id;
}

}  // namespace poolea
