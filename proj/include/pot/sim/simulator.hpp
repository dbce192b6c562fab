#pragma once

// Corridor simulation: a straight two-way highway with RSUs on a fixed grid,
// constant-speed vehicles, Poisson events and per-RSU voting sessions.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pot/proof_chain.hpp"
#include "pot/sim/config.hpp"
#include "pot/sim/metrics.hpp"
#include "pot/vote_log.hpp"

namespace pot::sim {

/// Signature timestamps are kEpoch + floor(simulation seconds).
inline constexpr std::int64_t kEpoch = 1'700'000'000;

enum class AgentRole { kHonest, kMalicious, kColluding };
std::string_view to_string(AgentRole role);

struct VehicleAgent {
  std::size_t id = 0;
  AgentRole role = AgentRole::kHonest;
  std::size_t group_id = 0;  // colluding agents only
  int direction = 1;         // +1 toward increasing x
  double speed_mps = 0.0;
  double entry_time_s = 0.0;
  double entry_x_m = 0.0;
  double exit_time_s = 0.0;
  double prior_miles = 0.0;
  /// Reputation of the chain held on entering the corridor.
  double prior_vvmt = 0.0;
  double integrity_cost = 0.0;  // V_i
  bool sid = false;

  double position_m(double t) const { return entry_x_m + direction * speed_mps * (t - entry_time_s); }
  bool active(double t) const { return t >= entry_time_s && t <= exit_time_s; }
  bool malicious() const { return role != AgentRole::kHonest; }
};

/// RSUs every rsu_spacing along y = 0, extending history_max_miles (plus one
/// spacing) beyond both corridor ends so prior travel is attested too. Each
/// RSU is adjacent to the two nearest on either side.
class Highway {
 public:
  explicit Highway(const SimConfig& config);

  const RsuRegistry& registry() const noexcept { return registry_; }
  std::size_t size() const noexcept { return rsus_.size(); }
  const RsuIdentity& rsu(std::size_t i) const { return rsus_[i]; }
  double x_m(std::size_t i) const { return rsus_[i].position.x_m(); }
  /// RSUs inside [0, corridor length].
  const std::vector<std::size_t>& corridor() const noexcept { return corridor_; }
  double length_m() const noexcept { return length_m_; }
  double spacing_m() const noexcept { return spacing_m_; }
  std::int64_t first_grid_index() const noexcept { return k_min_; }

 private:
  std::vector<RsuIdentity> rsus_;
  std::vector<std::size_t> corridor_;
  RsuRegistry registry_;
  double length_m_;
  double spacing_m_;
  std::int64_t k_min_;
};

/// One RSU a vehicle drives past, in travel order.
struct Pass {
  std::size_t rsu = 0;
  double time_s = 0.0;
  bool dropped = false;  // signature lost, leaves a gap in the chain
};

std::vector<Pass> passes_of(const VehicleAgent& agent, const Highway& highway,
                            const SimConfig& config);

/// Reputation of the chain made of the retained passes before time t
/// (inclusive). Matches reputation_of on the materialized chain.
double vvmt_at(const std::vector<Pass>& passes, double t, const Highway& highway,
               const VotingConfig& voting);

/// Vehicles present at t = 0 plus arrivals at both ends until the horizon.
std::vector<VehicleAgent> generate_population(const SimConfig& config, const Highway& highway);

std::vector<EligibilityPoint> eligibility_table(const std::vector<VehicleAgent>& agents,
                                                const std::vector<double>& grid);
/// True when p_sid never decreases along the table (empty thresholds ignored).
bool p_sid_non_decreasing(const std::vector<EligibilityPoint>& table);
/// Lowest threshold whose eligible set has an SID share of at least `target`.
/// Empty when no non-empty eligible set reaches it.
std::optional<double> threshold_for_p_sid(const std::vector<VehicleAgent>& agents, double target);
/// Highest threshold admitting at least `count` vehicles.
double threshold_for_eligible_count(const std::vector<VehicleAgent>& agents, std::size_t count);
std::size_t eligible_count(const std::vector<VehicleAgent>& agents, double threshold);

struct RunOptions {
  bool trace = false;
};

struct RunResult {
  SimMetrics metrics;
  /// JSON lines, when requested.
  std::vector<std::string> trace;
  VoteLog vote_log;
};

/// Throws ConfigError when the config does not validate.
RunResult run(const SimConfig& config, const RunOptions& options = {});

}  // namespace pot::sim
