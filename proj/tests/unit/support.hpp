#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "pot/proof_chain.hpp"

namespace pot::testing {

/// RSUs on a straight line along x, each adjacent to its immediate neighbors.
struct Corridor {
  std::vector<RsuIdentity> rsus;
  RsuRegistry registry;

  static Corridor make(std::size_t count, double spacing_m, std::uint64_t seed_base = 1000) {
    Corridor c;
    for (std::size_t i = 0; i < count; ++i) {
      double x = spacing_m * static_cast<double>(i);
      c.rsus.push_back({generate_keypair(seed_from_u64(seed_base + i)), Position::from_meters(x)});
      c.registry.add(c.rsus.back().keys.public_key(), c.rsus.back().position, x);
      if (i > 0) c.registry.connect(c.rsus[i - 1].keys.public_key(), c.rsus[i].keys.public_key());
    }
    return c;
  }
};

/// Vehicle passes RSUs start, start+1, ... collecting `length` signatures
/// through issue_signature, one every `dt` seconds.
inline ProofChain drive(const Corridor& c, const KeyPair& vehicle, std::size_t start,
                        std::size_t length, std::int64_t t0, std::int64_t dt,
                        const VerificationPolicy& policy) {
  ProofChain chain;
  std::optional<LocationSignature> prev;
  for (std::size_t k = 0; k < length; ++k) {
    const RsuIdentity& rsu = c.rsus[start + k];
    std::int64_t t = t0 + static_cast<std::int64_t>(k) * dt;
    auto req = make_request(vehicle, t, std::nullopt, rsu.position, prev);
    LocationSignature sig = issue_signature(rsu, c.registry, req, policy, t);
    chain.append(sig);
    prev = sig;
  }
  return chain;
}

inline Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

}  // namespace pot::testing
