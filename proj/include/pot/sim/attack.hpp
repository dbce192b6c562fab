#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pot/sim/config.hpp"

namespace pot::sim {

enum class AttackKind { kReplay, kForgery, kKeySwapCollusion, kSybilFlood };

std::string_view to_string(AttackKind kind);
/// "replay", "forgery", "key_swap_collusion", "sybil_flood". Throws ParseError.
AttackKind attack_kind_from_string(std::string_view name);

struct ScenarioReport {
  AttackKind kind = AttackKind::kReplay;
  std::size_t attempts = 0;
  /// Attempts the protocol let through.
  std::size_t accepted = 0;
  /// Scenario-specific figures, in a fixed order.
  std::vector<std::pair<std::string, double>> details;

  double detail(std::string_view name) const;
};

/// Uses config.seed, config.policy, config.voting and config.attack.
ScenarioReport attack_scenario(AttackKind kind, const SimConfig& config);

/// name,value rows with attempts and accepted first.
std::string format_report_csv(const ScenarioReport& report);

}  // namespace pot::sim
