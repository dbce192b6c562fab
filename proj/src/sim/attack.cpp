#include "pot/sim/attack.hpp"

#include <algorithm>
#include <random>

#include "pot/error.hpp"
#include "pot/sim/metrics.hpp"
#include "pot/sim/random.hpp"
#include "pot/sim/simulator.hpp"
#include "pot/vvmt.hpp"

namespace pot::sim {

namespace {

enum : std::uint64_t { kStreamAttack = 11, kTagAttackKey = 21 };

constexpr std::int64_t kHop = 300;  // seconds between neighbouring RSUs

struct Lab {
  const SimConfig& config;
  Highway highway;
  std::mt19937_64 rng;
  std::uint64_t next_key = 0;

  explicit Lab(const SimConfig& c)
      : config(c), highway(c), rng(make_stream(c.seed, kStreamAttack)) {}

  KeyPair fresh_key() {
    return generate_keypair(seed_from_u64(key_hash({config.seed, kTagAttackKey, next_key++})));
  }

  std::size_t pick_start(std::size_t length) {
    std::size_t last = highway.size() - std::min(length, highway.size());
    return std::uniform_int_distribution<std::size_t>(0, last)(rng);
  }

  // Honest collection of `length` signatures at consecutive RSUs.
  ProofChain drive(const KeyPair& vehicle, std::size_t start, std::size_t length, std::int64_t t0) {
    ProofChain chain;
    for (std::size_t i = 0; i < length && start + i < highway.size(); ++i) {
      const RsuIdentity& rsu = highway.rsu(start + i);
      std::int64_t t = t0 + static_cast<std::int64_t>(i) * kHop;
      std::optional<LocationSignature> prev;
      if (const auto* last = chain.last_signature()) prev = *last;
      auto req = make_request(vehicle, t, std::nullopt, rsu.position, prev);
      chain.append(issue_signature(rsu, highway.registry(), req, config.policy, t));
    }
    return chain;
  }

  bool accepted(const ProofChain& chain, const PublicKey* owner = nullptr) const {
    return verify_chain(chain, highway.registry(), config.policy, owner).accepted;
  }
};

void flip_byte(Bytes& b, std::size_t at) { b[at % b.size()] ^= 0x01; }

void tamper(LocationSignature& sig, int field, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> any(0, 1023);
  switch (field) {
    case 0: flip_byte(sig.rsu_public_key.bytes, any(rng)); break;
    case 1: flip_byte(sig.vehicle_public_key.bytes, any(rng)); break;
    case 2: sig.timestamp += 1 + static_cast<std::int64_t>(any(rng) % 30); break;
    case 3: sig.event_hash.bytes[any(rng) % kDigestSize] ^= 0x80; break;
    case 4: sig.previous_hash.bytes[any(rng) % kDigestSize] ^= 0x80; break;
    case 5: flip_byte(sig.rsu_signature.bytes, any(rng)); break;
    default: sig.rsu_position->x_mm += 1 + static_cast<std::int64_t>(any(rng)); break;
  }
}

ScenarioReport replay(Lab& lab) {
  const auto& ap = lab.config.attack;
  ScenarioReport r{AttackKind::kReplay, 0, 0, {}};
  std::size_t at_issuance = 0, as_proof = 0, spliced = 0;

  VotingConfig voting = lab.config.voting;
  voting.mode = VotingMode::kPpv;
  voting.n_thld = std::numeric_limits<std::size_t>::max() / 4;

  for (std::size_t i = 0; i < ap.instances; ++i) {
    std::size_t len = std::uniform_int_distribution<std::size_t>(1, ap.chain_length)(lab.rng);
    std::size_t start = lab.pick_start(len + 1);
    std::int64_t t0 = kEpoch + static_cast<std::int64_t>(i) * 10'000;
    KeyPair victim = lab.fresh_key();
    KeyPair thief = lab.fresh_key();
    ProofChain stolen = lab.drive(victim, start, len, t0);
    const LocationSignature& last = *stolen.last_signature();
    std::size_t next = start + stolen.signature_count();
    std::int64_t t_next = last.timestamp + kHop;

    // 1. extend the victim's chain at the next RSU under the thief's key
    ++r.attempts;
    if (next < lab.highway.size()) {
      auto req = make_request(thief, t_next, std::nullopt, lab.highway.rsu(next).position, last);
      try {
        issue_signature(lab.highway.rsu(next), lab.highway.registry(), req, lab.config.policy,
                        t_next);
        ++r.accepted;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kOwnershipFailure) ++at_issuance;
      }
    } else {
      ++at_issuance;
    }

    // 2. present the stolen chain as the thief's proof
    ++r.attempts;
    std::size_t rsu_index = start + stolen.signature_count() - 1;
    VotingSession session(i, EventType::kIncident, lab.highway.rsu(rsu_index).keys.public_key());
    Vote vote = make_vote(thief, i, EventType::kIncident, 1, t_next,
                          lab.highway.rsu(rsu_index).position, stolen);
    auto up = submit_vote_ppv(session, vote, voting, lab.highway.registry(), lab.config.policy);
    if (up.accepted) {
      ++r.accepted;
    } else if (up.reject_reason == RejectReason::kInvalidProof) {
      ++as_proof;
    }

    // 3. splice a stolen signature onto the thief's own chain
    ++r.attempts;
    std::size_t own_start = lab.pick_start(len);
    ProofChain own = lab.drive(thief, own_start, len, t0 - 100'000);
    own.append(last);
    if (lab.accepted(own, &thief.public_key())) {
      ++r.accepted;
    } else {
      ++spliced;
    }
  }
  r.details = {{"rejected_at_issuance", static_cast<double>(at_issuance)},
               {"rejected_as_proof", static_cast<double>(as_proof)},
               {"rejected_spliced", static_cast<double>(spliced)}};
  return r;
}

ScenarioReport forgery(Lab& lab) {
  const auto& ap = lab.config.attack;
  ScenarioReport r{AttackKind::kForgery, 0, 0, {}};
  std::vector<double> per_field(7, 0.0);
  for (std::size_t i = 0; i < ap.instances; ++i) {
    std::size_t len = std::uniform_int_distribution<std::size_t>(1, ap.chain_length)(lab.rng);
    KeyPair vehicle = lab.fresh_key();
    ProofChain chain =
        lab.drive(vehicle, lab.pick_start(len), len, kEpoch + static_cast<std::int64_t>(i) * 10'000);
    std::size_t at = std::uniform_int_distribution<std::size_t>(0, chain.size() - 1)(lab.rng);
    int field = static_cast<int>(i % 7);
    tamper(std::get<LocationSignature>(chain.entries[at]), field, lab.rng);
    ++r.attempts;
    if (lab.accepted(chain, &vehicle.public_key())) {
      ++r.accepted;
    } else {
      ++per_field[static_cast<std::size_t>(field)];
    }
  }
  const char* names[] = {"rejected_rsu_key",      "rejected_vehicle_key", "rejected_timestamp",
                         "rejected_event_hash",   "rejected_previous_hash",
                         "rejected_rsu_signature", "rejected_rsu_position"};
  for (std::size_t f = 0; f < per_field.size(); ++f) r.details.emplace_back(names[f], per_field[f]);
  return r;
}

// A coalition shares `coalition_chains` honestly earned chains (and their
// keys) among `coalition_size` members, each of whom votes in every session.
ScenarioReport key_swap_collusion(Lab& lab) {
  const auto& ap = lab.config.attack;
  ScenarioReport r{AttackKind::kKeySwapCollusion, 0, 0, {}};
  std::size_t chains = std::max<std::size_t>(1, std::min(ap.coalition_chains, ap.coalition_size));

  std::vector<KeyPair> keys;
  std::vector<ProofChain> earned;
  double miles = 0.0;
  for (std::size_t c = 0; c < chains; ++c) {
    keys.push_back(lab.fresh_key());
    std::size_t len = std::max<std::size_t>(ap.chain_length, 2);
    earned.push_back(lab.drive(keys.back(), lab.pick_start(len), len, kEpoch));
    miles += total_distance(earned.back(), DistanceMetric{}, true);
  }

  VotingConfig voting = lab.config.voting;
  voting.mode = VotingMode::kPpv;
  voting.n_thld = ap.coalition_size + 1;  // keep sessions open
  ChainVerifier verifier(lab.highway.registry(), lab.config.policy);
  std::size_t duplicates = 0;
  for (std::size_t s = 0; s < ap.instances; ++s) {
    // session at the RSU where one of the shared chains ends
    std::size_t rsu_index = 0;
    const LocationSignature& tail = *earned[s % chains].last_signature();
    for (std::size_t k = 0; k < lab.highway.size(); ++k) {
      if (lab.highway.rsu(k).keys.public_key() == tail.rsu_public_key) rsu_index = k;
    }
    const RsuIdentity& rsu = lab.highway.rsu(rsu_index);
    VotingSession session(s, EventType::kCongestion, rsu.keys.public_key());
    std::int64_t t = earned[s % chains].last_signature()->timestamp + 1;
    for (std::size_t member = 0; member < ap.coalition_size; ++member) {
      std::size_t c = (s + member) % chains;
      Vote vote = make_vote(keys[c], s, EventType::kCongestion, 1, t, rsu.position, earned[c]);
      ++r.attempts;
      auto up = submit_vote_ppv(session, vote, voting, lab.highway.registry(), lab.config.policy,
                                &verifier);
      if (up.accepted) {
        ++r.accepted;
      } else if (up.reject_reason == RejectReason::kDuplicateVoter) {
        ++duplicates;
      }
    }
  }
  double travel_cost = miles * ap.c_adv_per_vvmt;
  double reward = static_cast<double>(r.accepted) * ap.r_adv;
  r.details = {{"coalition_size", static_cast<double>(ap.coalition_size)},
               {"chains", static_cast<double>(chains)},
               {"sessions", static_cast<double>(ap.instances)},
               {"rejected_duplicate", static_cast<double>(duplicates)},
               {"accepted_per_session", ap.instances ? static_cast<double>(r.accepted) / ap.instances : 0.0},
               {"chain_miles", miles},
               {"travel_cost", travel_cost},
               {"adversarial_reward", reward},
               {"net_gain", reward - travel_cost}};
  return r;
}

ScenarioReport sybil_flood(Lab& lab) {
  const auto& ap = lab.config.attack;
  ScenarioReport r{AttackKind::kSybilFlood, 0, 0, {}};
  const RsuIdentity& rsu = lab.highway.rsu(lab.highway.corridor().front());
  VotingConfig cpv = lab.config.voting;
  cpv.mode = VotingMode::kCpv;
  cpv.n_thld = ap.sybils + 1;
  VotingConfig ppv = cpv;
  ppv.mode = VotingMode::kPpv;
  ppv.vvmt_thld = std::max(lab.config.voting.vvmt_thld, 1.0);

  VotingSession s_cpv(1, EventType::kIncident, rsu.keys.public_key());
  VotingSession s_ppv(1, EventType::kIncident, rsu.keys.public_key());
  std::size_t cpv_ok = 0, ppv_ok = 0, missing_proof = 0;
  for (std::size_t i = 0; i < ap.sybils; ++i) {
    KeyPair fake = lab.fresh_key();
    Vote vote = make_vote(fake, 1, EventType::kIncident, 1, kEpoch, rsu.position);
    r.attempts += 2;
    if (submit_vote_cpv(s_cpv, vote, cpv, lab.highway.registry()).accepted) ++cpv_ok;
    auto up = submit_vote_ppv(s_ppv, vote, ppv, lab.highway.registry(), lab.config.policy);
    if (up.accepted) ++ppv_ok;
    if (up.reject_reason == RejectReason::kMissingProof) ++missing_proof;
  }
  r.accepted = cpv_ok + ppv_ok;
  r.details = {{"identities", static_cast<double>(ap.sybils)},
               {"cpv_accepted", static_cast<double>(cpv_ok)},
               {"ppv_accepted", static_cast<double>(ppv_ok)},
               {"ppv_missing_proof", static_cast<double>(missing_proof)},
               {"ppv_vvmt_thld", ppv.vvmt_thld}};
  return r;
}

}  // namespace

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::kReplay: return "replay";
    case AttackKind::kForgery: return "forgery";
    case AttackKind::kKeySwapCollusion: return "key_swap_collusion";
    case AttackKind::kSybilFlood: return "sybil_flood";
  }
  return "unknown";
}

AttackKind attack_kind_from_string(std::string_view name) {
  for (auto k : {AttackKind::kReplay, AttackKind::kForgery, AttackKind::kKeySwapCollusion,
                 AttackKind::kSybilFlood}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::kParseError, "unknown attack '" + std::string(name) + "'");
}

double ScenarioReport::detail(std::string_view name) const {
  for (const auto& [k, v] : details) {
    if (k == name) return v;
  }
  throw Error(ErrorCode::kInvalidArgument, "no detail '" + std::string(name) + "'");
}

ScenarioReport attack_scenario(AttackKind kind, const SimConfig& config) {
  config.validate();
  Lab lab(config);
  switch (kind) {
    case AttackKind::kReplay: return replay(lab);
    case AttackKind::kForgery: return forgery(lab);
    case AttackKind::kKeySwapCollusion: return key_swap_collusion(lab);
    case AttackKind::kSybilFlood: return sybil_flood(lab);
  }
  return {};
}

std::string format_report_csv(const ScenarioReport& report) {
  std::string out = "name,value\n";
  out += "scenario," + std::string(to_string(report.kind)) + "\n";
  out += "attempts," + std::to_string(report.attempts) + "\n";
  out += "accepted," + std::to_string(report.accepted) + "\n";
  for (const auto& [k, v] : report.details) out += k + "," + format_double(v) + "\n";
  return out;
}

}  // namespace pot::sim
