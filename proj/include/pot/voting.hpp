#pragma once

// Event-validation voting at an RSU: the quorum/two-thirds decision rule,
// conventional plurality voting (CPV) and proof-gated voting (PPV).

#include <cstdint>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "pot/proof_chain.hpp"
#include "pot/vvmt.hpp"

namespace pot {

enum class VotingMode { kCpv, kPpv };

std::string_view to_string(VotingMode mode);
VotingMode voting_mode_from_string(std::string_view name);

struct Vote {
  PublicKey voter_public_key;
  std::uint64_t event_id = 0;
  EventType event_type = EventType::kIncident;
  std::int8_t value = 1;
  std::int64_t timestamp = 0;
  Position position;
  /// Travel proof; not covered by the vote signature.
  std::optional<ProofChain> proof;
  Signature vehicle_signature;
};

/// voter key || event id || event type || value || timestamp || position.
Bytes signing_bytes(const Vote& vote);

Vote make_vote(const KeyPair& voter, std::uint64_t event_id, EventType type, std::int8_t value,
               std::int64_t timestamp, Position position,
               std::optional<ProofChain> proof = std::nullopt);

struct VotingConfig {
  std::size_t n_thld = 5;
  double vvmt_thld = 0.0;
  VotingMode mode = VotingMode::kCpv;
  VvmtParams vvmt_params;
  DistanceMetric metric;
  /// Maximum distance from the session's RSU, meters.
  double location_constraint_m = 500.0;

  void validate() const;
};

enum class DecisionReason {
  kConsensus,        // positives reached two thirds
  kMajorityAgainst,  // negatives reached two thirds
  kNoConsensus,
};

std::string_view to_string(DecisionReason reason);

struct Decision {
  int value = 0;  // +1 confirmed, -1 not confirmed
  DecisionReason reason = DecisionReason::kConsensus;

  bool operator==(const Decision&) const = default;
};

/// Empty while n_vo < n_thld; +1 iff 3 * positive_count >= 2 * n_vo.
std::optional<Decision> decide(std::size_t positive_count, std::size_t n_vo, std::size_t n_thld);

enum class RejectReason {
  kSessionClosed,
  kUnknownEventType,
  kEventMismatch,
  kInvalidValue,
  kBadSignature,
  kOutOfRange,
  kDuplicateVoter,
  kMissingProof,
  kInvalidProof,
  kInsufficientVvmt,
};

std::string_view to_string(RejectReason reason);
RejectReason reject_reason_from_string(std::string_view name);

struct SessionUpdate {
  bool accepted = false;
  std::optional<RejectReason> reject_reason;
  std::optional<Decision> decision;
  std::size_t n_vo = 0;
  /// Reputation computed for the voter (PPV votes that reached that gate).
  std::optional<double> vvmt;
};

/// Votes collected at one RSU for one event. Single-writer. After a decision
/// the tally is cleared and the session closes.
class VotingSession {
 public:
  VotingSession(std::uint64_t event_id, EventType event_type, PublicKey rsu_public_key)
      : event_id_(event_id), event_type_(event_type), rsu_public_key_(std::move(rsu_public_key)) {}

  std::uint64_t event_id() const noexcept { return event_id_; }
  EventType event_type() const noexcept { return event_type_; }
  const PublicKey& rsu_public_key() const noexcept { return rsu_public_key_; }
  const std::vector<Vote>& collected() const noexcept { return collected_; }
  std::size_t n_vo() const noexcept { return collected_.size(); }
  std::size_t positive_count() const noexcept { return positive_; }
  const std::optional<Decision>& outcome() const noexcept { return outcome_; }
  bool closed() const noexcept { return closed_; }
  bool has_voted(const PublicKey& voter) const { return voters_.contains(voter); }

 private:
  friend SessionUpdate submit_vote_cpv(VotingSession&, const Vote&, const VotingConfig&,
                                       const RsuRegistry&);
  friend SessionUpdate submit_vote_ppv(VotingSession&, const Vote&, const VotingConfig&,
                                       const RsuRegistry&, const VerificationPolicy&,
                                       ChainVerifier*);
  SessionUpdate accept(const Vote& vote, const VotingConfig& config);

  std::uint64_t event_id_;
  EventType event_type_;
  PublicKey rsu_public_key_;
  std::vector<Vote> collected_;
  std::set<PublicKey> voters_;
  std::size_t positive_ = 0;
  std::optional<Decision> outcome_;
  bool closed_ = false;
};

/// Throws ConfigError if the session's RSU is not registered.
SessionUpdate submit_vote_cpv(VotingSession& session, const Vote& vote, const VotingConfig& config,
                              const RsuRegistry& registry);

/// CPV checks, then: proof present, proof verifies with the voter as owner,
/// reputation >= vvmt_thld. `verifier`, when given, must wrap the same
/// registry and policy and is used to reuse earlier verification work.
SessionUpdate submit_vote_ppv(VotingSession& session, const Vote& vote, const VotingConfig& config,
                              const RsuRegistry& registry, const VerificationPolicy& policy,
                              ChainVerifier* verifier = nullptr);

}  // namespace pot
