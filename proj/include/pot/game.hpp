#pragma once

// The complete-information voting game: payoffs, super-integrity drivers
// (SIDs), the all-cheat equilibrium test and a brute-force pure NE oracle.
// Also the opt-in payoff model for the VVMT eligibility threshold.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace pot {

enum class Action : std::int8_t { kCheat = -1, kAbstain = 0, kTruth = 1 };

std::string_view to_string(Action a);

using StrategyProfile = std::vector<Action>;

/// How "x is the majority" is decided from the count of x among N_vo voters.
enum class MajorityComparator {
  kStrictTwoThirds,     // 3x > 2 N_vo
  kInclusiveTwoThirds,  // 3x >= 2 N_vo
};

struct GameConfig {
  double reward = 10.0;      // R
  double punishment = 5.0;   // P
  double vote_cost = 1.0;    // c
  std::vector<double> integrity_costs;  // V_i
  std::size_t n_thld = 2;
  MajorityComparator majority = MajorityComparator::kStrictTwoThirds;

  std::size_t voters() const noexcept { return integrity_costs.size(); }
  /// R > c, n_thld > 1. Throws ConfigError.
  void validate() const;
};

/// Throws IndexOutOfRange for a bad index or a profile of the wrong length.
double payoff(std::size_t voter, const StrategyProfile& profile, const GameConfig& config);

bool is_sid(double integrity_cost, const GameConfig& config);
/// #{i : V_i > R - c}
std::size_t count_sids(const GameConfig& config);

struct Deviation {
  std::size_t voter = 0;
  Action better_action = Action::kAbstain;
  double gain = 0.0;

  bool operator==(const Deviation&) const = default;
};

/// Strictly profitable unilateral deviation from `profile`, if any.
std::optional<Deviation> find_profitable_deviation(const StrategyProfile& profile,
                                                   const GameConfig& config);

/// SIDs abstain and everyone else cheats; if nobody is a non-SID, everyone
/// cheats.
StrategyProfile all_cheat_profile(const GameConfig& config);

struct AllCheatVerdict {
  bool is_ne = false;
  /// N_SID <= |I| - N_thld
  bool closed_form_ne = false;
  /// Direct unilateral-deviation test on all_cheat_profile.
  bool deviation_check_ne = false;
  std::optional<Deviation> witness;
};

/// The closed form assumes every V_i > -c. Below that a cheater prefers
/// cheating even without a quorum, and the two checks can disagree; is_ne
/// reports the deviation check.
AllCheatVerdict all_cheat_is_pure_ne(const GameConfig& config);

inline constexpr std::size_t kMaxEnumerationVoters = 12;

/// Every pure-strategy NE, in lexicographic order of actions (-1 < 0 < 1).
/// Throws TooLarge above kMaxEnumerationVoters.
std::vector<StrategyProfile> enumerate_pure_ne(const GameConfig& config);

enum class Role { kNormal, kAdversary };

struct OptInModel {
  double r_norm = 100.0;
  double r_adv = 100.0;
  double c_norm_per_vvmt = 0.1;
  double c_adv_per_vvmt = 0.2;
  double big_m = 400.0;
  double vvmt_thld = 0.0;

  void validate() const;
};

/// R - (C/2)(M + thld): a participant with VVMT uniform on (thld, M).
double expected_payoff(const OptInModel& model, Role role);

enum class Regime {
  kNormalDominates,     // threshold <= 0
  kCrossover,           // 0 < threshold < M
  kAdversaryDominates,  // threshold >= M
};

std::string_view to_string(Regime r);

struct CriticalThreshold {
  double value = 0.0;
  Regime regime = Regime::kCrossover;
};

/// 2 (R_adv - R_norm) / (C_adv - C_norm) - M. Throws Infeasible unless
/// C_adv > C_norm.
CriticalThreshold critical_threshold(const OptInModel& model);

}  // namespace pot
