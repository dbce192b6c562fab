#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "pot/error.hpp"
#include "pot/proof_chain.hpp"
#include "support.hpp"

namespace pot {
namespace {

using testing::Corridor;
using testing::drive;

ErrorCode issue_error(const RsuIdentity& rsu, const RsuRegistry& reg, const SignatureRequest& req,
                      const VerificationPolicy& policy, std::int64_t now) {
  try {
    issue_signature(rsu, reg, req, policy, now);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "issue_signature did not throw";
  return ErrorCode::kInvalidArgument;
}

LocationSignature& sig_at(ProofChain& c, std::size_t i) {
  return std::get<LocationSignature>(c.entries[i]);
}

class Issuance : public ::testing::Test {
 protected:
  Corridor corridor = Corridor::make(4, 1000.0);
  KeyPair vehicle = generate_keypair(seed_from_u64(50));
  KeyPair other = generate_keypair(seed_from_u64(51));
  VerificationPolicy policy;
};

TEST_F(Issuance, GenesisHasZeroPreviousHash) {
  const auto& rsu = corridor.rsus[0];
  auto req = make_request(vehicle, 100, std::nullopt, rsu.position, std::nullopt);
  LocationSignature s = issue_signature(rsu, corridor.registry, req, policy, 100);
  EXPECT_TRUE(s.previous_hash.is_zero());
  EXPECT_TRUE(s.event_hash.is_zero());
  EXPECT_EQ(s.timestamp, 100);
  EXPECT_EQ(s.rsu_position, rsu.position);
  EXPECT_TRUE(verify(rsu.keys.public_key(), signing_bytes(s), s.rsu_signature));
}

TEST_F(Issuance, SecondSignatureLinksToGenesis) {
  ProofChain c = drive(corridor, vehicle, 0, 2, 100, 60, policy);
  EXPECT_EQ(sig_at(c, 1).previous_hash, link_hash(sig_at(c, 0)));
}

TEST_F(Issuance, EventHashCoversPayload) {
  const auto& rsu = corridor.rsus[0];
  EventReport e{EventType::kIncident, Position::from_meters(50.0), 99};
  auto req = make_request(vehicle, 100, e, rsu.position, std::nullopt);
  EXPECT_EQ(issue_signature(rsu, corridor.registry, req, policy, 100).event_hash,
            hash(canonical_encode(e)));
}

TEST_F(Issuance, ForeignPreviousIsOwnershipFailure) {
  ProofChain theirs = drive(corridor, other, 0, 1, 100, 60, policy);
  auto req = make_request(vehicle, 160, std::nullopt, corridor.rsus[1].position, sig_at(theirs, 0));
  EXPECT_EQ(issue_error(corridor.rsus[1], corridor.registry, req, policy, 160),
            ErrorCode::kOwnershipFailure);
}

TEST_F(Issuance, TamperedRequestIsBadVehicleSignature) {
  auto req = make_request(vehicle, 100, std::nullopt, corridor.rsus[0].position, std::nullopt);
  req.timestamp += 1;
  EXPECT_EQ(issue_error(corridor.rsus[0], corridor.registry, req, policy, 100),
            ErrorCode::kBadVehicleSignature);
}

TEST_F(Issuance, DistantEventIsImplausible) {
  EventReport e{EventType::kIncident, Position::from_meters(5000.0), 99};
  auto req = make_request(vehicle, 100, e, Position::from_meters(0.0), std::nullopt);
  EXPECT_EQ(issue_error(corridor.rsus[0], corridor.registry, req, policy, 100),
            ErrorCode::kImplausibleReport);
}

TEST_F(Issuance, StalePreviousIsExpired) {
  ProofChain c = drive(corridor, vehicle, 0, 1, 100, 60, policy);
  std::int64_t now = 100 + policy.validity_window_s + 1;
  auto req = make_request(vehicle, now, std::nullopt, corridor.rsus[1].position, sig_at(c, 0));
  EXPECT_EQ(issue_error(corridor.rsus[1], corridor.registry, req, policy, now),
            ErrorCode::kExpired);
  // Exactly at the window edge is still fine.
  now = 100 + policy.validity_window_s;
  req = make_request(vehicle, now, std::nullopt, corridor.rsus[1].position, sig_at(c, 0));
  EXPECT_NO_THROW(issue_signature(corridor.rsus[1], corridor.registry, req, policy, now));
}

TEST_F(Issuance, NonAdjacentOrUnknownIssuerIsIllegitimate) {
  ProofChain c = drive(corridor, vehicle, 0, 1, 100, 60, policy);
  auto req = make_request(vehicle, 200, std::nullopt, corridor.rsus[3].position, sig_at(c, 0));
  EXPECT_EQ(issue_error(corridor.rsus[3], corridor.registry, req, policy, 200),
            ErrorCode::kIllegitimateIssuer);

  RsuIdentity rogue{generate_keypair(seed_from_u64(777)), corridor.rsus[0].position};
  LocationSignature fake = seal_signature(rogue, vehicle.public_key(), 100, Digest{}, Digest{});
  req = make_request(vehicle, 160, std::nullopt, corridor.rsus[1].position, fake);
  EXPECT_EQ(issue_error(corridor.rsus[1], corridor.registry, req, policy, 160),
            ErrorCode::kIllegitimateIssuer);

  LocationSignature forged = sig_at(c, 0);
  forged.timestamp += 1;
  req = make_request(vehicle, 160, std::nullopt, corridor.rsus[1].position, forged);
  EXPECT_EQ(issue_error(corridor.rsus[1], corridor.registry, req, policy, 160),
            ErrorCode::kIllegitimateIssuer);
}

TEST_F(Issuance, UnregisteredIssuerRefuses) {
  RsuIdentity rogue{generate_keypair(seed_from_u64(778)), Position{}};
  auto req = make_request(vehicle, 100, std::nullopt, Position{}, std::nullopt);
  EXPECT_EQ(issue_error(rogue, corridor.registry, req, policy, 100),
            ErrorCode::kIllegitimateIssuer);
}

class Verification : public ::testing::Test {
 protected:
  Corridor corridor = Corridor::make(30, 1000.0);
  KeyPair vehicle = generate_keypair(seed_from_u64(60));
  VerificationPolicy policy;
};

TEST_F(Verification, ThreeSignatureChainAccepted) {
  ProofChain c = drive(corridor, vehicle, 0, 3, 100, 60, policy);
  VerificationReport r = verify_chain(c, corridor.registry, policy);
  EXPECT_TRUE(r.accepted);
  EXPECT_EQ(r.valid_count, 3u);
  EXPECT_EQ(r.total_count, 3u);
  EXPECT_FALSE(r.first_failure);
}

TEST_F(Verification, MiddleEventHashFlipBreaksNextLink) {
  ProofChain c = drive(corridor, vehicle, 0, 3, 100, 60, policy);
  sig_at(c, 1).event_hash.bytes[0] ^= 0x01;
  VerificationReport r = verify_chain(c, corridor.registry, policy);
  EXPECT_FALSE(r.accepted);
  ASSERT_TRUE(r.first_failure);
  EXPECT_EQ(*r.first_failure, (FailurePoint{2, ChainFailure::kHashLinkMismatch}));
}

TEST_F(Verification, ImpossibleSpeedIsPlausibilityFailure) {
  // 1000 m every 5 s is 200 m/s; the corridor limit is 60 mph.
  VerificationPolicy corridor_policy = policy;
  corridor_policy.max_plausible_speed_mps = 60.0 * kMetersPerSecondPerMph;
  ProofChain c = drive(corridor, vehicle, 0, 3, 100, 5, corridor_policy);
  VerificationReport r = verify_chain(c, corridor.registry, corridor_policy);
  EXPECT_FALSE(r.accepted);
  ASSERT_TRUE(r.first_failure);
  EXPECT_EQ(r.first_failure->reason, ChainFailure::kPlausibilityFailure);
  EXPECT_EQ(r.first_failure->index, 1u);
}

TEST_F(Verification, EmptyChainThrows) {
  try {
    verify_chain(ProofChain{}, corridor.registry, policy);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyChain);
  }
}

TEST_F(Verification, NonMonotonicTime) {
  ProofChain c = drive(corridor, vehicle, 0, 2, 100, 60, policy);
  RsuIdentity& rsu = corridor.rsus[2];
  c.append(seal_signature(rsu, vehicle.public_key(), 160, Digest{}, link_hash(sig_at(c, 1))));
  VerificationReport r = verify_chain(c, corridor.registry, policy);
  EXPECT_EQ(*r.first_failure, (FailurePoint{2, ChainFailure::kNonMonotonicTime}));
}

TEST_F(Verification, PositionMismatchAndUnknownIssuer) {
  ProofChain c = drive(corridor, vehicle, 0, 1, 100, 60, policy);
  sig_at(c, 0).rsu_position->x_mm += 5;
  EXPECT_EQ(verify_chain(c, corridor.registry, policy).first_failure->reason,
            ChainFailure::kPositionMismatch);

  RsuIdentity rogue{generate_keypair(seed_from_u64(999)), Position{}};
  ProofChain r;
  r.append(seal_signature(rogue, vehicle.public_key(), 1, Digest{}, Digest{}));
  EXPECT_EQ(verify_chain(r, corridor.registry, policy).first_failure->reason,
            ChainFailure::kIllegitimateIssuer);
}

TEST_F(Verification, GapsRejectedWhenPolicyForbids) {
  ProofChain c = drive(corridor, vehicle, 0, 3, 100, 60, policy);
  c.entries[1] = Gap{};
  VerificationPolicy strict = policy;
  strict.allow_gaps = false;
  EXPECT_EQ(*verify_chain(c, corridor.registry, strict).first_failure,
            (FailurePoint{1, ChainFailure::kGapNotAllowed}));
  EXPECT_TRUE(verify_chain(c, corridor.registry, policy).accepted);
}

TEST_F(Verification, ThresholdCountsValidSignatures) {
  ProofChain c = drive(corridor, vehicle, 0, 3, 100, 60, policy);
  VerificationPolicy need4 = policy;
  need4.threshold_m = 4;
  VerificationReport r = verify_chain(c, corridor.registry, need4);
  EXPECT_FALSE(r.accepted);
  EXPECT_EQ(r.valid_count, 3u);
  EXPECT_EQ(*r.first_failure, (FailurePoint{3, ChainFailure::kBelowThreshold}));
}

// ---- properties over generated chains ----

struct Generated {
  ProofChain chain;
  KeyPair owner;
};

Generated random_chain(const Corridor& c, std::mt19937_64& rng, std::size_t len,
                       const VerificationPolicy& policy) {
  KeyPair v = generate_keypair(seed_from_u64(rng()));
  std::size_t start = rng() % (c.rsus.size() - len + 1);
  std::int64_t dt = 40 + static_cast<std::int64_t>(rng() % 100);
  return {drive(c, v, start, len, 1'700'000'000 + static_cast<std::int64_t>(rng() % 1000), dt,
                policy),
          v};
}

// Applies mutation `field` (0..6) to signature `s`.
void mutate(LocationSignature& s, int field, std::mt19937_64& rng) {
  auto flip = [&](Bytes& b) { b[rng() % b.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8)); };
  switch (field) {
    case 0: flip(s.rsu_public_key.bytes); break;
    case 1: flip(s.vehicle_public_key.bytes); break;
    case 2: s.timestamp += 1 + static_cast<std::int64_t>(rng() % 5); break;
    case 3: s.event_hash.bytes[rng() % kDigestSize] ^= 0x80; break;
    case 4: s.previous_hash.bytes[rng() % kDigestSize] ^= 0x01; break;
    case 5: flip(s.rsu_signature.bytes); break;
    case 6: s.rsu_position->y_mm += 1 + static_cast<std::int64_t>(rng() % 1000); break;
  }
}

TEST_F(Verification, IssuedChainsVerifyFully) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 200; ++i) {
    auto g = random_chain(corridor, rng, 1 + rng() % 20, policy);
    VerificationReport r = verify_chain(g.chain, corridor.registry, policy, &g.owner.public_key());
    ASSERT_TRUE(r.accepted);
    ASSERT_EQ(r.valid_count, r.total_count);
  }
}

TEST_F(Verification, SingleFieldTamperFailsAtOrAfterIndex) {
  std::mt19937_64 rng(102);
  for (int i = 0; i < 300; ++i) {
    auto g = random_chain(corridor, rng, 2 + rng() % 19, policy);
    std::size_t at = rng() % g.chain.size();
    int field = static_cast<int>(rng() % 7);
    mutate(sig_at(g.chain, at), field, rng);
    VerificationReport r = verify_chain(g.chain, corridor.registry, policy);
    ASSERT_FALSE(r.accepted) << "field " << field << " at " << at;
    ASSERT_TRUE(r.first_failure);
    if (at + 1 < g.chain.size()) ASSERT_GE(r.first_failure->index, at);
  }
}

TEST_F(Verification, ReplayedSignatureIsOwnershipFailure) {
  std::mt19937_64 rng(103);
  for (int i = 0; i < 200; ++i) {
    auto victim = random_chain(corridor, rng, 1 + rng() % 10, policy);
    KeyPair thief = generate_keypair(seed_from_u64(rng()));
    // Whole chain claimed by another key.
    VerificationReport r = verify_chain(victim.chain, corridor.registry, policy, &thief.public_key());
    ASSERT_EQ(*r.first_failure, (FailurePoint{0, ChainFailure::kOwnershipFailure}));
    ASSERT_EQ(r.valid_count, 0u);
    // One stolen signature spliced into the thief's own chain.
    auto own = random_chain(corridor, rng, 2 + rng() % 10, policy);
    std::size_t at = rng() % own.chain.size();
    own.chain.entries[at] = victim.chain.entries[rng() % victim.chain.size()];
    r = verify_chain(own.chain, corridor.registry, policy, &own.owner.public_key());
    ASSERT_EQ(*r.first_failure, (FailurePoint{at, ChainFailure::kOwnershipFailure}));
  }
}

TEST_F(Verification, MOfNToleratesDroppedSignatures) {
  std::mt19937_64 rng(104);
  for (int i = 0; i < 200; ++i) {
    std::size_t n = 2 + rng() % 19;
    auto g = random_chain(corridor, rng, n, policy);
    std::size_t drop = rng() % n;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < drop; ++k) g.chain.entries[idx[k]] = Gap{};
    std::size_t retained = n - drop;
    for (std::size_t m = 1; m <= n; ++m) {
      VerificationPolicy p = policy;
      p.threshold_m = m;
      VerificationReport r = verify_chain(g.chain, corridor.registry, p);
      ASSERT_EQ(r.valid_count, retained);
      ASSERT_EQ(r.accepted, retained >= m);
    }
  }
}

TEST_F(Verification, CachedVerifierMatchesDirect) {
  std::mt19937_64 rng(105);
  ChainVerifier verifier(corridor.registry, policy);
  for (int i = 0; i < 100; ++i) {
    auto g = random_chain(corridor, rng, 2 + rng() % 15, policy);
    // Grow the chain one entry at a time, as a voter would present it.
    for (std::size_t len = 1; len <= g.chain.size(); ++len) {
      ProofChain prefix;
      prefix.entries.assign(g.chain.entries.begin(), g.chain.entries.begin() + len);
      if (rng() % 5 == 0) mutate(sig_at(prefix, len - 1), static_cast<int>(rng() % 7), rng);
      ASSERT_EQ(verifier.verify(prefix, &g.owner.public_key()),
                verify_chain(prefix, corridor.registry, policy, &g.owner.public_key()));
    }
  }
}

TEST_F(Verification, CachedVerifierSkipsKnownPrefix) {
  ChainVerifier verifier(corridor.registry, policy);
  ProofChain c = drive(corridor, vehicle, 0, 10, 100, 60, policy);
  ProofChain head;
  head.entries.assign(c.entries.begin(), c.entries.begin() + 9);
  verifier.verify(head);
  std::size_t before = verifier.entries_checked();
  EXPECT_TRUE(verifier.verify(c).accepted);
  EXPECT_EQ(verifier.entries_checked() - before, 1u);
}

TEST(Registry, AdjacencyIsSymmetric) {
  auto c = Corridor::make(3, 500.0);
  const auto& a = c.rsus[0].keys.public_key();
  const auto& b = c.rsus[1].keys.public_key();
  EXPECT_TRUE(c.registry.adjacent_or_same(a, b));
  EXPECT_TRUE(c.registry.adjacent_or_same(b, a));
  EXPECT_TRUE(c.registry.adjacent_or_same(a, a));
  EXPECT_FALSE(c.registry.adjacent_or_same(a, c.rsus[2].keys.public_key()));
}

}  // namespace
}  // namespace pot
