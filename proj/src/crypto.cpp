#include "pot/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <mutex>

#include "pot/error.hpp"

namespace pot {
namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) {
      throw Error(ErrorCode::kKeyError, "libsodium failed to initialize");
    }
  });
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

bool Digest::is_zero() const noexcept {
  return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

KeyPair generate_keypair(const Seed& seed) {
  ensure_sodium();
  PublicKey pk{Bytes(kPublicKeySize)};
  Bytes sk(kSecretKeySize);
  crypto_sign_seed_keypair(pk.bytes.data(), sk.data(), seed.data());
  return KeyPair(std::move(pk), std::move(sk));
}

Seed seed_from_u64(std::uint64_t n) {
  Seed seed{};
  for (int i = 0; i < 8; ++i) seed[i] = static_cast<std::uint8_t>(n >> (56 - 8 * i));
  return seed;
}

Signature sign(const Bytes& secret_key, ByteView message) {
  ensure_sodium();
  if (secret_key.size() != kSecretKeySize) {
    throw Error(ErrorCode::kKeyError, "secret key must be 64 bytes");
  }
  Signature sig{Bytes(kSignatureSize)};
  crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(),
                       secret_key.data());
  return sig;
}

bool verify(const PublicKey& public_key, ByteView message, const Signature& signature) noexcept {
  if (public_key.bytes.size() != kPublicKeySize || signature.bytes.size() != kSignatureSize) {
    return false;
  }
  try {
    ensure_sodium();
  } catch (...) {
    return false;
  }
  return crypto_sign_verify_detached(signature.bytes.data(), message.data(), message.size(),
                                     public_key.bytes.data()) == 0;
}

Digest hash(ByteView message) {
  ensure_sodium();
  Digest d;
  crypto_hash_sha256(d.bytes.data(), message.data(), message.size());
  return d;
}

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(ErrorCode::kParseError, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::kParseError, "invalid hex digit");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

Digest digest_from_hex(std::string_view hex) {
  Bytes raw = from_hex(hex);
  if (raw.size() != kDigestSize) throw Error(ErrorCode::kParseError, "digest must be 32 bytes");
  Digest d;
  std::copy(raw.begin(), raw.end(), d.bytes.begin());
  return d;
}

}  // namespace pot
