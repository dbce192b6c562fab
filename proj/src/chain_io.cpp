#include "pot/chain_io.hpp"

#include <fstream>
#include <iterator>

#include "pot/encoding.hpp"
#include "pot/error.hpp"

namespace pot {
namespace {

constexpr std::uint8_t kMagic[4] = {'P', 'O', 'T', 'C'};
constexpr std::uint8_t kTagGap = 0;
constexpr std::uint8_t kTagSignature = 1;

nlohmann::json position_to_json(const Position& p) { return {{"x_mm", p.x_mm}, {"y_mm", p.y_mm}}; }

Position position_from_json(const nlohmann::json& j) {
  return {j.at("x_mm").get<std::int64_t>(), j.at("y_mm").get<std::int64_t>()};
}

}  // namespace

Bytes encode_chain_file(const ProofChain& chain) {
  ByteWriter w;
  w.raw(kMagic);
  w.u8(kChainFileVersion);
  w.u32(static_cast<std::uint32_t>(chain.size()));
  for (const auto& entry : chain.entries) {
    if (const auto* sig = std::get_if<LocationSignature>(&entry)) {
      w.u8(kTagSignature);
      w.prefixed(canonical_encode(*sig));
    } else {
      w.u8(kTagGap);
    }
  }
  return std::move(w).bytes();
}

ProofChain decode_chain_file(ByteView bytes) {
  ByteReader r(bytes);
  Bytes magic = r.raw(4);
  if (!std::equal(magic.begin(), magic.end(), std::begin(kMagic))) {
    throw Error(ErrorCode::kParseError, "not a POTC chain file");
  }
  if (std::uint8_t version = r.u8(); version != kChainFileVersion) {
    throw Error(ErrorCode::kParseError, "unsupported chain file version " + std::to_string(version));
  }
  std::uint32_t count = r.u32();
  ProofChain chain;
  chain.entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint8_t tag = r.u8();
    if (tag == kTagGap) {
      chain.append_gap();
    } else if (tag == kTagSignature) {
      chain.append(decode_location_signature(r.prefixed()));
    } else {
      throw Error(ErrorCode::kParseError, "bad chain entry tag");
    }
  }
  r.expect_done();
  return chain;
}

void write_chain_file(const std::filesystem::path& path, const ProofChain& chain) {
  write_file(path, encode_chain_file(chain));
}

ProofChain read_chain_file(const std::filesystem::path& path) {
  return decode_chain_file(read_file(path));
}

nlohmann::json chain_to_json(const ProofChain& chain) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& entry : chain.entries) {
    const auto* sig = std::get_if<LocationSignature>(&entry);
    if (!sig) {
      entries.push_back({{"gap", true}});
      continue;
    }
    nlohmann::json j = {
        {"rsu_public_key", to_hex(sig->rsu_public_key)},
        {"vehicle_public_key", to_hex(sig->vehicle_public_key)},
        {"timestamp", sig->timestamp},
        {"event_hash", to_hex(sig->event_hash)},
        {"previous_hash", to_hex(sig->previous_hash)},
        {"rsu_signature", to_hex(sig->rsu_signature)},
    };
    if (sig->rsu_position) j["rsu_position"] = position_to_json(*sig->rsu_position);
    entries.push_back(std::move(j));
  }
  return {{"version", kChainFileVersion}, {"entries", std::move(entries)}};
}

ProofChain chain_from_json(const nlohmann::json& doc) {
  try {
    ProofChain chain;
    for (const auto& j : doc.at("entries")) {
      if (j.value("gap", false)) {
        chain.append_gap();
        continue;
      }
      LocationSignature sig;
      sig.rsu_public_key.bytes = from_hex(j.at("rsu_public_key").get<std::string>());
      sig.vehicle_public_key.bytes = from_hex(j.at("vehicle_public_key").get<std::string>());
      sig.timestamp = j.at("timestamp").get<std::int64_t>();
      sig.event_hash = digest_from_hex(j.at("event_hash").get<std::string>());
      sig.previous_hash = digest_from_hex(j.at("previous_hash").get<std::string>());
      sig.rsu_signature.bytes = from_hex(j.at("rsu_signature").get<std::string>());
      if (j.contains("rsu_position")) sig.rsu_position = position_from_json(j.at("rsu_position"));
      chain.append(std::move(sig));
    }
    return chain;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

nlohmann::json registry_to_json(const RsuRegistry& registry) {
  nlohmann::json rsus = nlohmann::json::array();
  for (const auto& [key, info] : registry.entries()) {
    nlohmann::json adjacent = nlohmann::json::array();
    for (const auto& n : info.adjacent) adjacent.push_back(to_hex(n));
    rsus.push_back({{"public_key", to_hex(key)},
                    {"position", position_to_json(info.position)},
                    {"milepost_m", info.milepost_m},
                    {"adjacent", std::move(adjacent)}});
  }
  return {{"rsus", std::move(rsus)}};
}

RsuRegistry registry_from_json(const nlohmann::json& doc) {
  try {
    RsuRegistry registry;
    for (const auto& j : doc.at("rsus")) {
      registry.add(PublicKey{from_hex(j.at("public_key").get<std::string>())},
                   position_from_json(j.at("position")), j.value("milepost_m", 0.0));
    }
    for (const auto& j : doc.at("rsus")) {
      PublicKey self{from_hex(j.at("public_key").get<std::string>())};
      for (const auto& n : j.value("adjacent", nlohmann::json::array())) {
        registry.connect(self, PublicKey{from_hex(n.get<std::string>())});
      }
    }
    return registry;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, ByteView bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  write_file(path, ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace pot
