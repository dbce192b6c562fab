#include "pot/proof_chain.hpp"

#include <algorithm>
#include <cstring>

#include "pot/encoding.hpp"
#include "pot/error.hpp"

namespace pot {
namespace {

void write_position(ByteWriter& w, const Position& p) {
  w.i64(p.x_mm);
  w.i64(p.y_mm);
}

Position read_position(ByteReader& r) {
  Position p;
  p.x_mm = r.i64();
  p.y_mm = r.i64();
  return p;
}

void write_event(ByteWriter& w, const EventReport& e) {
  w.u8(static_cast<std::uint8_t>(e.type));
  write_position(w, e.location);
  w.i64(e.observed_at);
}

EventReport read_event(ByteReader& r) {
  EventReport e;
  std::uint8_t raw = r.u8();
  if (!is_known_event_type(raw)) throw Error(ErrorCode::kParseError, "unknown event type");
  e.type = static_cast<EventType>(raw);
  e.location = read_position(r);
  e.observed_at = r.i64();
  return e;
}

void write_signed_fields(ByteWriter& w, const LocationSignature& s) {
  w.prefixed(s.rsu_public_key.bytes);
  w.prefixed(s.vehicle_public_key.bytes);
  w.i64(s.timestamp);
  w.digest(s.event_hash);
  w.digest(s.previous_hash);
}

void write_request_fields(ByteWriter& w, const SignatureRequest& q) {
  w.prefixed(q.vehicle_public_key.bytes);
  w.i64(q.timestamp);
  w.u8(q.event ? 1 : 0);
  if (q.event) write_event(w, *q.event);
  write_position(w, q.position);
  w.u8(q.previous ? 1 : 0);
  if (q.previous) w.prefixed(canonical_encode(*q.previous));
}

std::uint8_t read_flag(ByteReader& r) {
  std::uint8_t flag = r.u8();
  if (flag > 1) throw Error(ErrorCode::kParseError, "presence flag must be 0 or 1");
  return flag;
}

const LocationSignature* as_signature(const ChainEntry& e) {
  return std::get_if<LocationSignature>(&e);
}

// Index of the nearest retained signature strictly before `i`, if any.
std::optional<std::size_t> previous_retained(const ProofChain& chain, std::size_t i) {
  while (i > 0) {
    --i;
    if (as_signature(chain.entries[i])) return i;
  }
  return std::nullopt;
}

struct ScanResult {
  std::size_t valid_count = 0;
  std::optional<FailurePoint> failure;
};

bool authentic(const LocationSignature& sig, const RsuRegistry& registry,
               std::optional<ChainFailure>* why) {
  const RsuInfo* info = registry.find(sig.rsu_public_key);
  if (!info) {
    *why = ChainFailure::kIllegitimateIssuer;
    return false;
  }
  if (!sig.rsu_position || *sig.rsu_position != info->position) {
    *why = ChainFailure::kPositionMismatch;
    return false;
  }
  if (!verify(sig.rsu_public_key, signing_bytes(sig), sig.rsu_signature)) {
    *why = ChainFailure::kBadRsuSignature;
    return false;
  }
  return true;
}

// Runs every pass over entries [begin, size). Entries before `begin` are
// assumed to have passed already; pair checks may look back into them.
ScanResult scan(const ProofChain& chain, std::size_t begin, const RsuRegistry& registry,
                const VerificationPolicy& policy, const PublicKey* owner) {
  ScanResult out;
  const std::size_t n = chain.size();
  auto fail = [&](std::size_t i, ChainFailure reason) {
    if (!out.failure) out.failure = FailurePoint{i, reason};
  };

  if (!policy.allow_gaps) {
    for (std::size_t i = begin; i < n && !out.failure; ++i) {
      if (!as_signature(chain.entries[i])) fail(i, ChainFailure::kGapNotAllowed);
    }
  }

  std::vector<bool> owned(n, true);
  for (std::size_t i = begin; i < n; ++i) {
    const auto* sig = as_signature(chain.entries[i]);
    if (sig && owner && sig->vehicle_public_key != *owner) {
      owned[i] = false;
      fail(i, ChainFailure::kOwnershipFailure);
    }
  }

  for (std::size_t i = begin; i < n && !out.failure; ++i) {
    const auto* sig = as_signature(chain.entries[i]);
    if (!sig) continue;
    if (i == 0) {
      if (!sig->previous_hash.is_zero()) fail(i, ChainFailure::kHashLinkMismatch);
    } else if (const auto* prev = as_signature(chain.entries[i - 1])) {
      if (sig->previous_hash != link_hash(*prev)) fail(i, ChainFailure::kHashLinkMismatch);
    }
  }

  // Authenticity is evaluated for every entry so valid_count is meaningful
  // even when an earlier pass already failed.
  for (std::size_t i = begin; i < n; ++i) {
    const auto* sig = as_signature(chain.entries[i]);
    if (!sig) continue;
    std::optional<ChainFailure> why;
    if (authentic(*sig, registry, &why)) {
      if (owned[i]) ++out.valid_count;
    } else {
      fail(i, *why);
    }
  }

  for (std::size_t i = begin; i < n && !out.failure; ++i) {
    const auto* sig = as_signature(chain.entries[i]);
    if (!sig) continue;
    if (auto j = previous_retained(chain, i)) {
      const auto& prev = std::get<LocationSignature>(chain.entries[*j]);
      if (sig->timestamp <= prev.timestamp) fail(i, ChainFailure::kNonMonotonicTime);
    }
  }

  for (std::size_t i = begin; i < n && !out.failure; ++i) {
    const auto* sig = as_signature(chain.entries[i]);
    if (!sig) continue;
    if (auto j = previous_retained(chain, i)) {
      const auto& prev = std::get<LocationSignature>(chain.entries[*j]);
      double meters = distance_m(*prev.rsu_position, *sig->rsu_position);
      double seconds = static_cast<double>(sig->timestamp - prev.timestamp);
      if (meters > policy.max_plausible_speed_mps * seconds) {
        fail(i, ChainFailure::kPlausibilityFailure);
      }
    }
  }
  return out;
}

const PublicKey* resolve_owner(const ProofChain& chain, const PublicKey* owner) {
  if (owner) return owner;
  for (const auto& e : chain.entries) {
    if (const auto* sig = as_signature(e)) return &sig->vehicle_public_key;
  }
  return nullptr;
}

VerificationReport finish(const ProofChain& chain, const VerificationPolicy& policy,
                          std::size_t valid_count, std::optional<FailurePoint> failure) {
  VerificationReport report;
  report.valid_count = valid_count;
  report.total_count = chain.size();
  report.first_failure = failure;
  if (!failure && valid_count < policy.threshold_m) {
    report.first_failure = FailurePoint{chain.size(), ChainFailure::kBelowThreshold};
  }
  report.accepted = !report.first_failure.has_value();
  return report;
}

}  // namespace

std::string_view to_string(EventType type) {
  switch (type) {
    case EventType::kIncident: return "incident";
    case EventType::kWorkzone: return "workzone";
    case EventType::kCongestion: return "congestion";
    case EventType::kOther: return "other";
  }
  return "unknown";
}

EventType event_type_from_string(std::string_view name) {
  for (std::uint8_t raw = 0; raw <= 3; ++raw) {
    auto t = static_cast<EventType>(raw);
    if (to_string(t) == name) return t;
  }
  throw Error(ErrorCode::kParseError, "unknown event type '" + std::string(name) + "'");
}

Bytes canonical_encode(const EventReport& event) {
  ByteWriter w;
  write_event(w, event);
  return std::move(w).bytes();
}

Digest event_digest(const std::optional<EventReport>& event) {
  if (!event) return Digest{};
  return hash(canonical_encode(*event));
}

Bytes signing_bytes(const LocationSignature& sig) {
  ByteWriter w;
  write_signed_fields(w, sig);
  return std::move(w).bytes();
}

Bytes canonical_encode(const LocationSignature& sig) {
  ByteWriter w;
  write_signed_fields(w, sig);
  w.prefixed(sig.rsu_signature.bytes);
  w.u8(sig.rsu_position ? 1 : 0);
  if (sig.rsu_position) write_position(w, *sig.rsu_position);
  return std::move(w).bytes();
}

LocationSignature decode_location_signature(ByteView bytes) {
  ByteReader r(bytes);
  LocationSignature s;
  s.rsu_public_key.bytes = r.prefixed();
  s.vehicle_public_key.bytes = r.prefixed();
  s.timestamp = r.i64();
  s.event_hash = r.digest();
  s.previous_hash = r.digest();
  s.rsu_signature.bytes = r.prefixed();
  if (read_flag(r)) s.rsu_position = read_position(r);
  r.expect_done();
  return s;
}

Digest link_hash(const LocationSignature& sig) { return hash(canonical_encode(sig)); }

Bytes signing_bytes(const SignatureRequest& request) {
  ByteWriter w;
  write_request_fields(w, request);
  return std::move(w).bytes();
}

Bytes canonical_encode(const SignatureRequest& request) {
  ByteWriter w;
  write_request_fields(w, request);
  w.prefixed(request.vehicle_signature.bytes);
  return std::move(w).bytes();
}

SignatureRequest decode_signature_request(ByteView bytes) {
  ByteReader r(bytes);
  SignatureRequest q;
  q.vehicle_public_key.bytes = r.prefixed();
  q.timestamp = r.i64();
  if (read_flag(r)) q.event = read_event(r);
  q.position = read_position(r);
  if (read_flag(r)) q.previous = decode_location_signature(r.prefixed());
  q.vehicle_signature.bytes = r.prefixed();
  r.expect_done();
  return q;
}

SignatureRequest make_request(const KeyPair& vehicle, std::int64_t timestamp,
                              std::optional<EventReport> event, Position position,
                              std::optional<LocationSignature> previous) {
  SignatureRequest q;
  q.vehicle_public_key = vehicle.public_key();
  q.timestamp = timestamp;
  q.event = std::move(event);
  q.position = position;
  q.previous = std::move(previous);
  q.vehicle_signature = sign(vehicle, signing_bytes(q));
  return q;
}

std::size_t ProofChain::signature_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [](const ChainEntry& e) { return as_signature(e) != nullptr; }));
}

const LocationSignature* ProofChain::last_signature() const noexcept {
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    if (const auto* sig = as_signature(*it)) return sig;
  }
  return nullptr;
}

void RsuRegistry::add(const PublicKey& key, Position position, double milepost_m) {
  auto& info = entries_[key];
  info.position = position;
  info.milepost_m = milepost_m;
}

void RsuRegistry::connect(const PublicKey& a, const PublicKey& b) {
  auto ia = entries_.find(a);
  auto ib = entries_.find(b);
  if (ia == entries_.end() || ib == entries_.end()) {
    throw Error(ErrorCode::kInvalidArgument, "connect: both RSUs must be registered");
  }
  ia->second.adjacent.insert(b);
  ib->second.adjacent.insert(a);
}

const RsuInfo* RsuRegistry::find(const PublicKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

bool RsuRegistry::adjacent_or_same(const PublicKey& a, const PublicKey& b) const {
  if (a == b) return contains(a);
  const RsuInfo* info = find(a);
  return info && info->adjacent.count(b) > 0;
}

void VerificationPolicy::validate() const {
  if (threshold_m == 0) throw Error(ErrorCode::kConfigError, "threshold_m must be positive");
  if (!(max_plausible_speed_mps > 0)) {
    throw Error(ErrorCode::kConfigError, "max_plausible_speed must be positive");
  }
  if (validity_window_s < 0) throw Error(ErrorCode::kConfigError, "validity_window must be >= 0");
  if (heuristic_max_event_distance_m < 0) {
    throw Error(ErrorCode::kConfigError, "heuristic_max_event_distance must be >= 0");
  }
}

LocationSignature seal_signature(const RsuIdentity& rsu, const PublicKey& vehicle,
                                 std::int64_t timestamp, const Digest& event_hash,
                                 const Digest& previous_hash) {
  LocationSignature sig;
  sig.rsu_public_key = rsu.keys.public_key();
  sig.vehicle_public_key = vehicle;
  sig.timestamp = timestamp;
  sig.event_hash = event_hash;
  sig.previous_hash = previous_hash;
  sig.rsu_position = rsu.position;
  sig.rsu_signature = sign(rsu.keys, signing_bytes(sig));
  return sig;
}

LocationSignature issue_signature(const RsuIdentity& rsu, const RsuRegistry& registry,
                                  const SignatureRequest& request,
                                  const VerificationPolicy& policy, std::int64_t now) {
  const PublicKey& self = rsu.keys.public_key();
  if (!registry.contains(self)) {
    throw Error(ErrorCode::kIllegitimateIssuer, "issuing RSU is not registered");
  }
  if (!verify(request.vehicle_public_key, signing_bytes(request), request.vehicle_signature)) {
    throw Error(ErrorCode::kBadVehicleSignature, "request signature does not verify");
  }
  if (request.event &&
      distance_m(request.event->location, request.position) > policy.heuristic_max_event_distance_m) {
    throw Error(ErrorCode::kImplausibleReport, "event reported far from the reporter");
  }
  Digest previous_hash;
  if (const auto& prev = request.previous) {
    if (prev->vehicle_public_key != request.vehicle_public_key) {
      throw Error(ErrorCode::kOwnershipFailure, "previous signature belongs to another vehicle");
    }
    if (now - prev->timestamp > policy.validity_window_s) {
      throw Error(ErrorCode::kExpired, "previous signature is past its validity window");
    }
    const RsuInfo* issuer = registry.find(prev->rsu_public_key);
    if (!issuer || !registry.adjacent_or_same(self, prev->rsu_public_key) ||
        !prev->rsu_position || *prev->rsu_position != issuer->position ||
        !verify(prev->rsu_public_key, signing_bytes(*prev), prev->rsu_signature)) {
      throw Error(ErrorCode::kIllegitimateIssuer, "previous signature not from a neighboring RSU");
    }
    previous_hash = link_hash(*prev);
  }
  return seal_signature(rsu, request.vehicle_public_key, now, event_digest(request.event),
                        previous_hash);
}

std::string_view to_string(ChainFailure failure) {
  switch (failure) {
    case ChainFailure::kGapNotAllowed: return "GapNotAllowed";
    case ChainFailure::kOwnershipFailure: return "OwnershipFailure";
    case ChainFailure::kHashLinkMismatch: return "HashLinkMismatch";
    case ChainFailure::kIllegitimateIssuer: return "IllegitimateIssuer";
    case ChainFailure::kPositionMismatch: return "PositionMismatch";
    case ChainFailure::kBadRsuSignature: return "BadRsuSignature";
    case ChainFailure::kNonMonotonicTime: return "NonMonotonicTime";
    case ChainFailure::kPlausibilityFailure: return "PlausibilityFailure";
    case ChainFailure::kBelowThreshold: return "BelowThreshold";
  }
  return "Unknown";
}

VerificationReport verify_chain(const ProofChain& chain, const RsuRegistry& registry,
                                const VerificationPolicy& policy, const PublicKey* owner) {
  if (chain.empty()) throw Error(ErrorCode::kEmptyChain, "cannot verify an empty chain");
  ScanResult r = scan(chain, 0, registry, policy, resolve_owner(chain, owner));
  return finish(chain, policy, r.valid_count, r.failure);
}

std::size_t ChainVerifier::DigestHasher::operator()(const Digest& d) const noexcept {
  std::size_t h;
  std::memcpy(&h, d.bytes.data(), sizeof h);
  return h;
}

VerificationReport ChainVerifier::verify(const ProofChain& chain, const PublicKey* owner) {
  if (chain.empty()) throw Error(ErrorCode::kEmptyChain, "cannot verify an empty chain");
  const PublicKey* who = resolve_owner(chain, owner);

  // prefix[k] commits to the owner and the first k entries.
  std::vector<Digest> prefix(chain.size() + 1);
  prefix[0] = who ? hash(who->bytes) : Digest{};
  static const Digest kGapTag = hash(std::string_view("gap"));
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const auto* sig = as_signature(chain.entries[k]);
    Digest entry = sig ? link_hash(*sig) : kGapTag;
    ByteWriter w;
    w.digest(prefix[k]);
    w.digest(entry);
    prefix[k + 1] = hash(w.bytes());
  }

  std::size_t begin = 0;
  std::size_t prior_valid = 0;
  for (std::size_t k = chain.size(); k > 0; --k) {
    auto it = clean_prefixes_.find(prefix[k]);
    if (it != clean_prefixes_.end()) {
      begin = k;
      prior_valid = it->second;
      break;
    }
  }

  ScanResult r = scan(chain, begin, registry_, policy_, who);
  entries_checked_ += chain.size() - begin;
  std::size_t valid = prior_valid + r.valid_count;
  if (!r.failure) clean_prefixes_[prefix[chain.size()]] = valid;
  return finish(chain, policy_, valid, r.failure);
}

}  // namespace pot
