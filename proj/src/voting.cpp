#include "pot/voting.hpp"

#include "pot/encoding.hpp"
#include "pot/error.hpp"

namespace pot {

std::string_view to_string(VotingMode mode) { return mode == VotingMode::kCpv ? "CPV" : "PPV"; }

VotingMode voting_mode_from_string(std::string_view name) {
  if (name == "CPV" || name == "cpv") return VotingMode::kCpv;
  if (name == "PPV" || name == "ppv") return VotingMode::kPpv;
  throw Error(ErrorCode::kInvalidArgument, "unknown voting mode '" + std::string(name) + "'");
}

Bytes signing_bytes(const Vote& vote) {
  ByteWriter w;
  w.prefixed(vote.voter_public_key.bytes);
  w.u64(vote.event_id);
  w.u8(static_cast<std::uint8_t>(vote.event_type));
  w.u8(static_cast<std::uint8_t>(vote.value));
  w.i64(vote.timestamp);
  w.i64(vote.position.x_mm);
  w.i64(vote.position.y_mm);
  return std::move(w).bytes();
}

Vote make_vote(const KeyPair& voter, std::uint64_t event_id, EventType type, std::int8_t value,
               std::int64_t timestamp, Position position, std::optional<ProofChain> proof) {
  Vote v{voter.public_key(), event_id, type, value, timestamp, position, std::move(proof), {}};
  v.vehicle_signature = sign(voter, signing_bytes(v));
  return v;
}

void VotingConfig::validate() const {
  if (n_thld < 2) throw Error(ErrorCode::kConfigError, "voting.n_thld must be >= 2");
  if (!(vvmt_thld >= 0.0)) throw Error(ErrorCode::kConfigError, "voting.vvmt_thld must be >= 0");
  if (!(location_constraint_m > 0.0)) {
    throw Error(ErrorCode::kConfigError, "voting.location_constraint_m must be > 0");
  }
  vvmt_params.validate();
}

std::string_view to_string(DecisionReason reason) {
  switch (reason) {
    case DecisionReason::kConsensus: return "consensus";
    case DecisionReason::kMajorityAgainst: return "majority_against";
    case DecisionReason::kNoConsensus: return "no_consensus";
  }
  return "unknown";
}

std::optional<Decision> decide(std::size_t positive_count, std::size_t n_vo, std::size_t n_thld) {
  if (n_vo < n_thld) return std::nullopt;
  if (3 * positive_count >= 2 * n_vo) return Decision{1, DecisionReason::kConsensus};
  std::size_t negative = n_vo - positive_count;
  if (3 * negative >= 2 * n_vo) return Decision{-1, DecisionReason::kMajorityAgainst};
  return Decision{-1, DecisionReason::kNoConsensus};
}

namespace {

constexpr RejectReason kAllReasons[] = {
    RejectReason::kSessionClosed,  RejectReason::kUnknownEventType, RejectReason::kEventMismatch,
    RejectReason::kInvalidValue,   RejectReason::kBadSignature,     RejectReason::kOutOfRange,
    RejectReason::kDuplicateVoter, RejectReason::kMissingProof,     RejectReason::kInvalidProof,
    RejectReason::kInsufficientVvmt,
};

SessionUpdate rejected(const VotingSession& s, RejectReason why) {
  return {false, why, std::nullopt, s.n_vo(), std::nullopt};
}

// Checks shared by both modes. Returns the failure, if any.
std::optional<RejectReason> common_checks(const VotingSession& s, const Vote& vote,
                                          const VotingConfig& config,
                                          const RsuRegistry& registry) {
  if (s.closed()) return RejectReason::kSessionClosed;
  if (!is_known_event_type(static_cast<std::uint8_t>(vote.event_type))) {
    return RejectReason::kUnknownEventType;
  }
  if (vote.event_type != s.event_type() || vote.event_id != s.event_id()) {
    return RejectReason::kEventMismatch;
  }
  if (vote.value != 1 && vote.value != -1) return RejectReason::kInvalidValue;
  if (!verify(vote.voter_public_key, signing_bytes(vote), vote.vehicle_signature)) {
    return RejectReason::kBadSignature;
  }
  const RsuInfo* rsu = registry.find(s.rsu_public_key());
  if (!rsu) throw Error(ErrorCode::kConfigError, "session RSU is not registered");
  if (distance_m(rsu->position, vote.position) > config.location_constraint_m) {
    return RejectReason::kOutOfRange;
  }
  if (s.has_voted(vote.voter_public_key)) return RejectReason::kDuplicateVoter;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kSessionClosed: return "SessionClosed";
    case RejectReason::kUnknownEventType: return "UnknownEventType";
    case RejectReason::kEventMismatch: return "EventMismatch";
    case RejectReason::kInvalidValue: return "InvalidValue";
    case RejectReason::kBadSignature: return "BadSignature";
    case RejectReason::kOutOfRange: return "OutOfRange";
    case RejectReason::kDuplicateVoter: return "DuplicateVoter";
    case RejectReason::kMissingProof: return "MissingProof";
    case RejectReason::kInvalidProof: return "InvalidProof";
    case RejectReason::kInsufficientVvmt: return "InsufficientVvmt";
  }
  return "Unknown";
}

RejectReason reject_reason_from_string(std::string_view name) {
  for (auto r : kAllReasons) {
    if (to_string(r) == name) return r;
  }
  throw Error(ErrorCode::kParseError, "unknown reject reason '" + std::string(name) + "'");
}

SessionUpdate VotingSession::accept(const Vote& vote, const VotingConfig& config) {
  collected_.push_back(vote);
  voters_.insert(vote.voter_public_key);
  if (vote.value == 1) ++positive_;
  SessionUpdate up{true, std::nullopt, decide(positive_, collected_.size(), config.n_thld),
                   collected_.size(), std::nullopt};
  if (up.decision) {
    outcome_ = up.decision;
    collected_.clear();
    positive_ = 0;
    closed_ = true;
  }
  return up;
}

SessionUpdate submit_vote_cpv(VotingSession& session, const Vote& vote, const VotingConfig& config,
                              const RsuRegistry& registry) {
  if (auto why = common_checks(session, vote, config, registry)) return rejected(session, *why);
  return session.accept(vote, config);
}

SessionUpdate submit_vote_ppv(VotingSession& session, const Vote& vote, const VotingConfig& config,
                              const RsuRegistry& registry, const VerificationPolicy& policy,
                              ChainVerifier* verifier) {
  if (auto why = common_checks(session, vote, config, registry)) return rejected(session, *why);
  if (!vote.proof || vote.proof->empty()) return rejected(session, RejectReason::kMissingProof);
  VerificationReport report =
      verifier ? verifier->verify(*vote.proof, &vote.voter_public_key)
               : verify_chain(*vote.proof, registry, policy, &vote.voter_public_key);
  if (!report.accepted) return rejected(session, RejectReason::kInvalidProof);
  double vvmt;
  try {
    vvmt = reputation_of(*vote.proof, report, config.vvmt_params, config.metric, registry).score;
  } catch (const Error&) {
    return rejected(session, RejectReason::kInvalidProof);
  }
  if (vvmt < config.vvmt_thld) {
    SessionUpdate up = rejected(session, RejectReason::kInsufficientVvmt);
    up.vvmt = vvmt;
    return up;
  }
  SessionUpdate up = session.accept(vote, config);
  up.vvmt = vvmt;
  return up;
}

}  // namespace pot
