#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pot {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline constexpr std::size_t kDigestSize = 32;
inline constexpr std::size_t kSeedSize = 32;
inline constexpr std::size_t kPublicKeySize = 32;
inline constexpr std::size_t kSecretKeySize = 64;
inline constexpr std::size_t kSignatureSize = 64;

/// SHA-256 output. Value-initialized digests are all-zero, which is also the
/// genesis link of a proof chain.
struct Digest {
  std::array<std::uint8_t, kDigestSize> bytes{};

  bool is_zero() const noexcept;
  auto operator<=>(const Digest&) const = default;
};

using Seed = std::array<std::uint8_t, kSeedSize>;

/// Opaque public key bytes. Kept as a byte string so that malformed keys can
/// be represented (and rejected) rather than being unconstructible.
struct PublicKey {
  Bytes bytes;
  auto operator<=>(const PublicKey&) const = default;
};

struct Signature {
  Bytes bytes;
  auto operator<=>(const Signature&) const = default;
};

/// Ed25519 key pair. The secret half never appears in any protocol encoding.
class KeyPair {
 public:
  KeyPair(PublicKey public_key, Bytes secret_key)
      : public_key_(std::move(public_key)), secret_key_(std::move(secret_key)) {}

  const PublicKey& public_key() const noexcept { return public_key_; }
  const Bytes& secret_key() const noexcept { return secret_key_; }

 private:
  PublicKey public_key_;
  Bytes secret_key_;
};

KeyPair generate_keypair(const Seed& seed);

/// Convenience: a seed whose first eight bytes are `n` big-endian.
Seed seed_from_u64(std::uint64_t n);

Signature sign(const Bytes& secret_key, ByteView message);
inline Signature sign(const KeyPair& keys, ByteView message) {
  return sign(keys.secret_key(), message);
}

/// False for any malformed key or signature; never throws.
bool verify(const PublicKey& public_key, ByteView message, const Signature& signature) noexcept;

Digest hash(ByteView message);
inline Digest hash(std::string_view message) {
  return hash(ByteView(reinterpret_cast<const std::uint8_t*>(message.data()), message.size()));
}

std::string to_hex(ByteView bytes);
inline std::string to_hex(const Digest& d) { return to_hex(ByteView(d.bytes)); }
inline std::string to_hex(const PublicKey& k) { return to_hex(ByteView(k.bytes)); }
inline std::string to_hex(const Signature& s) { return to_hex(ByteView(s.bytes)); }

Bytes from_hex(std::string_view hex);
Digest digest_from_hex(std::string_view hex);

}  // namespace pot
