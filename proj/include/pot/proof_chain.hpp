#pragma once

// Location signatures, the hash-linked chains they form, and the RSU-side
// issuance and verification rules.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "pot/crypto.hpp"
#include "pot/geometry.hpp"

namespace pot {

enum class EventType : std::uint8_t {
  kIncident = 0,
  kWorkzone = 1,
  kCongestion = 2,
  kOther = 3,
};

inline bool is_known_event_type(std::uint8_t raw) { return raw <= 3; }
std::string_view to_string(EventType type);
EventType event_type_from_string(std::string_view name);

/// A traffic event as observed and reported by a vehicle.
struct EventReport {
  EventType type = EventType::kIncident;
  Position location;
  std::int64_t observed_at = 0;

  bool operator==(const EventReport&) const = default;
};

Bytes canonical_encode(const EventReport& event);

/// h_e: digest of the canonical event payload, all-zero when there is none.
Digest event_digest(const std::optional<EventReport>& event);

/// One RSU attestation of a vehicle's presence. The RSU signs
/// rsu key || vehicle key || timestamp || event hash || previous hash.
/// `rsu_position` is carried alongside (and hashed into the chain link) but is
/// not part of the signed content; verification checks it against the registry.
struct LocationSignature {
  PublicKey rsu_public_key;
  PublicKey vehicle_public_key;
  std::int64_t timestamp = 0;
  Digest event_hash;
  Digest previous_hash;
  Signature rsu_signature;
  std::optional<Position> rsu_position;

  bool operator==(const LocationSignature&) const = default;
};

/// The bytes covered by `rsu_signature`.
Bytes signing_bytes(const LocationSignature& sig);
/// All fields in declared order; this is what successors hash.
Bytes canonical_encode(const LocationSignature& sig);
LocationSignature decode_location_signature(ByteView bytes);
/// hash(canonical_encode(sig)), the value a successor stores as previous_hash.
Digest link_hash(const LocationSignature& sig);

struct SignatureRequest {
  PublicKey vehicle_public_key;
  std::int64_t timestamp = 0;
  std::optional<EventReport> event;
  Position position;
  std::optional<LocationSignature> previous;
  Signature vehicle_signature;

  bool operator==(const SignatureRequest&) const = default;
};

Bytes signing_bytes(const SignatureRequest& request);
Bytes canonical_encode(const SignatureRequest& request);
SignatureRequest decode_signature_request(ByteView bytes);

/// Builds and signs a request on behalf of the vehicle.
SignatureRequest make_request(const KeyPair& vehicle, std::int64_t timestamp,
                              std::optional<EventReport> event, Position position,
                              std::optional<LocationSignature> previous);

/// Placeholder for a signature the vehicle failed to collect or dropped.
struct Gap {
  bool operator==(const Gap&) const = default;
};

using ChainEntry = std::variant<LocationSignature, Gap>;

struct ProofChain {
  std::vector<ChainEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
  std::size_t signature_count() const noexcept;
  /// Most recent retained signature, if any.
  const LocationSignature* last_signature() const noexcept;
  void append(LocationSignature sig) { entries.emplace_back(std::move(sig)); }
  void append_gap() { entries.emplace_back(Gap{}); }

  bool operator==(const ProofChain&) const = default;
};

struct RsuInfo {
  Position position;
  /// Distance along the corridor from its origin, used by path metrics.
  double milepost_m = 0.0;
  std::set<PublicKey> adjacent;
};

/// Registered RSUs and their adjacency. Adjacency is kept symmetric.
class RsuRegistry {
 public:
  void add(const PublicKey& key, Position position, double milepost_m);
  void connect(const PublicKey& a, const PublicKey& b);

  const RsuInfo* find(const PublicKey& key) const;
  bool contains(const PublicKey& key) const { return find(key) != nullptr; }
  /// True when `b` issued next to or at `a` (same RSU or listed neighbor).
  bool adjacent_or_same(const PublicKey& a, const PublicKey& b) const;

  const std::map<PublicKey, RsuInfo>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::map<PublicKey, RsuInfo> entries_;
};

struct VerificationPolicy {
  std::int64_t validity_window_s = 600;
  double max_plausible_speed_mps = 45.0;
  std::size_t threshold_m = 1;
  double heuristic_max_event_distance_m = 1000.0;
  /// Gap markers are tolerated; links are then only enforced between
  /// signatures that are actually adjacent in the chain.
  bool allow_gaps = true;

  void validate() const;
};

struct RsuIdentity {
  KeyPair keys;
  Position position;
};

/// Signs the five attested fields; performs no checks.
LocationSignature seal_signature(const RsuIdentity& rsu, const PublicKey& vehicle,
                                 std::int64_t timestamp, const Digest& event_hash,
                                 const Digest& previous_hash);

/// RSU-side handling of a location-signature request. Throws pot::Error with
/// BadVehicleSignature, ImplausibleReport, OwnershipFailure, Expired or
/// IllegitimateIssuer when a check fails.
LocationSignature issue_signature(const RsuIdentity& rsu, const RsuRegistry& registry,
                                  const SignatureRequest& request,
                                  const VerificationPolicy& policy, std::int64_t now);

enum class ChainFailure {
  kGapNotAllowed,
  kOwnershipFailure,
  kHashLinkMismatch,
  kIllegitimateIssuer,
  kPositionMismatch,
  kBadRsuSignature,
  kNonMonotonicTime,
  kPlausibilityFailure,
  kBelowThreshold,
};

std::string_view to_string(ChainFailure failure);

struct FailurePoint {
  std::size_t index = 0;
  ChainFailure reason = ChainFailure::kHashLinkMismatch;

  bool operator==(const FailurePoint&) const = default;
};

struct VerificationReport {
  std::size_t valid_count = 0;
  std::size_t total_count = 0;
  bool accepted = false;
  std::optional<FailurePoint> first_failure;

  bool operator==(const VerificationReport&) const = default;
};

/// Checks run as ordered passes over the whole chain: gap policy, ownership,
/// hash links, issuer authenticity (registry, position, RSU signature),
/// timestamp order, then pairwise speed plausibility. The first failing pass
/// determines `first_failure`. A chain with no failures is accepted when
/// valid_count >= threshold_m. `owner` defaults to the first signature's
/// vehicle key. Throws EmptyChain for a chain without entries.
VerificationReport verify_chain(const ProofChain& chain, const RsuRegistry& registry,
                                const VerificationPolicy& policy,
                                const PublicKey* owner = nullptr);

/// verify_chain with memoization of failure-free prefixes. Chains are
/// append-only, so an RSU that already checked a vehicle's chain only needs to
/// check the new suffix. Results are identical to verify_chain.
class ChainVerifier {
 public:
  ChainVerifier(const RsuRegistry& registry, const VerificationPolicy& policy)
      : registry_(registry), policy_(policy) {}

  VerificationReport verify(const ProofChain& chain, const PublicKey* owner = nullptr);

  std::size_t entries_checked() const noexcept { return entries_checked_; }

 private:
  struct DigestHasher {
    std::size_t operator()(const Digest& d) const noexcept;
  };

  const RsuRegistry& registry_;
  VerificationPolicy policy_;
  std::unordered_map<Digest, std::size_t, DigestHasher> clean_prefixes_;
  std::size_t entries_checked_ = 0;
};

}  // namespace pot
