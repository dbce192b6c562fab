#pragma once

// On-disk forms of proof chains and RSU registries.
//
// Binary chain file ("POTC"):
//   magic "POTC" | version u8 (=1) | entry count u32 BE |
//   per entry: tag u8 (0 = gap, 1 = signature) | for signatures a u32 BE
//   length followed by the canonical encoding.

#include <filesystem>

#include "json.hpp"
#include "pot/proof_chain.hpp"

namespace pot {

inline constexpr std::uint8_t kChainFileVersion = 1;

Bytes encode_chain_file(const ProofChain& chain);
ProofChain decode_chain_file(ByteView bytes);

void write_chain_file(const std::filesystem::path& path, const ProofChain& chain);
ProofChain read_chain_file(const std::filesystem::path& path);

/// Hex-in-JSON form for debugging.
nlohmann::json chain_to_json(const ProofChain& chain);
ProofChain chain_from_json(const nlohmann::json& doc);

nlohmann::json registry_to_json(const RsuRegistry& registry);
RsuRegistry registry_from_json(const nlohmann::json& doc);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, ByteView bytes);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace pot
