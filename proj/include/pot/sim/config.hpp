#pragma once

// Simulation configuration. Loaded from JSON; every field has a default and
// unknown or mistyped fields are reported by dotted path.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pot/proof_chain.hpp"
#include "pot/voting.hpp"
#include "pot/vvmt.hpp"

namespace pot::sim {

/// V_i = base_i + beta * VVMT_i. Honest base ~ N(mean, sd); malicious base is
/// -|N(mean, sd)| so that malicious drivers gain from cheating.
struct IntegrityModel {
  double beta = 0.035;
  double honest_base_mean = 0.0;
  double honest_base_sd = 4.0;
  double malicious_base_mean = 5.0;
  double malicious_base_sd = 2.0;
};

struct GameParams {
  double reward = 10.0;
  double punishment = 5.0;
  double vote_cost = 1.0;
};

struct AttackParams {
  std::size_t instances = 200;
  std::size_t chain_length = 8;
  std::size_t coalition_size = 5;
  std::size_t coalition_chains = 2;
  std::size_t sybils = 50;
  double r_adv = 120.0;
  double c_adv_per_vvmt = 0.2;
};

struct SimConfig {
  std::uint64_t seed = 1;
  double duration_s = 1000.0;
  /// Extra time after `duration_s` with no new events, so late sessions can
  /// still reach a quorum.
  double drain_s = 300.0;
  double corridor_length_miles = 20.0;
  double rsu_spacing_miles = 5.0;
  double comm_range_m = 500.0;
  /// Defaults to comm_range_m.
  std::optional<double> sensing_radius_m;
  std::size_t max_vehicles = 2000;
  double vehicle_speed_mph = 60.0;
  double min_speed_fraction = 0.8;
  double traffic_density = 40.0;  // vehicles per mile, both directions
  double malicious_fraction = 0.0;
  double event_rate = 2.0;        // true events per minute
  double false_event_rate = 0.5;  // injected events per minute
  double vote_delay_mean_s = 2.0;
  /// Fabricated identities each malicious vehicle votes with, besides its own.
  std::size_t sybil_identities = 1;
  /// Per-message Bernoulli loss for votes and signature collection.
  double message_drop_probability = 0.0;
  /// Prior travel: honest ~ U(0, H); malicious ~ Exp(mean H / (2 ratio)),
  /// truncated at H.
  double history_max_miles = 400.0;
  double adversary_cost_ratio = 4.0;
  /// When set, voting.vvmt_thld is replaced by the lowest threshold at which
  /// the SID share among the run's eligible population reaches this value.
  std::optional<double> target_p_sid;
  std::vector<double> eligibility_grid{0, 50, 100, 150, 200, 250, 300, 350};

  VotingConfig voting;
  VerificationPolicy policy;
  GameParams game;
  IntegrityModel integrity_model;
  AttackParams attack;

  SimConfig();

  double sensing_radius() const { return sensing_radius_m.value_or(comm_range_m); }
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Throws ConfigError for unknown fields or wrong types, with the dotted path.
SimConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const SimConfig& config);

/// Sets a dotted path inside a config document, e.g. "voting.n_thld".
void set_config_field(nlohmann::json& doc, const std::string& path, const nlohmann::json& value);

}  // namespace pot::sim
