#include "pot/game.hpp"

#include <algorithm>
#include <cmath>

#include "pot/error.hpp"

namespace pot {

std::string_view to_string(Action a) {
  switch (a) {
    case Action::kCheat: return "-1";
    case Action::kAbstain: return "0";
    case Action::kTruth: return "1";
  }
  return "?";
}

void GameConfig::validate() const {
  if (!(reward > vote_cost)) throw Error(ErrorCode::kConfigError, "game requires R > c");
  if (n_thld <= 1) throw Error(ErrorCode::kConfigError, "game requires n_thld > 1");
  for (double v : integrity_costs) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kConfigError, "integrity costs must be finite");
  }
}

namespace {

struct Counts {
  std::size_t pos = 0;
  std::size_t neg = 0;
  std::size_t voted() const { return pos + neg; }
};

Counts count(const StrategyProfile& profile) {
  Counts c;
  for (Action a : profile) {
    if (a == Action::kTruth) ++c.pos;
    if (a == Action::kCheat) ++c.neg;
  }
  return c;
}

bool is_majority(std::size_t x, std::size_t n_vo, MajorityComparator cmp) {
  return cmp == MajorityComparator::kStrictTwoThirds ? 3 * x > 2 * n_vo : 3 * x >= 2 * n_vo;
}

// Payoff of a voter taking `action` given the resulting counts. Terms are
// summed in table order (R - c - V) so that V = R - c gives exactly 0.
double payoff_from_counts(Action action, double v_i, Counts c, const GameConfig& g) {
  if (action == Action::kAbstain) return 0.0;
  double integrity = action == Action::kCheat ? v_i : 0.0;
  std::size_t n_vo = c.voted();
  bool pos_major = n_vo >= g.n_thld && is_majority(c.pos, n_vo, g.majority);
  bool neg_major = n_vo >= g.n_thld && is_majority(c.neg, n_vo, g.majority);
  if (!pos_major && !neg_major) return -g.vote_cost - integrity;
  bool mine_major = action == Action::kTruth ? pos_major : neg_major;
  return mine_major ? g.reward - g.vote_cost - integrity : -g.punishment - g.vote_cost - integrity;
}

// gains below rounding noise are ties, not deviations
bool strictly_better(double then, double now) {
  return then - now > 1e-12 * std::max({1.0, std::abs(then), std::abs(now)});
}

Counts with_action(Counts c, Action from, Action to) {
  if (from == Action::kTruth) --c.pos;
  if (from == Action::kCheat) --c.neg;
  if (to == Action::kTruth) ++c.pos;
  if (to == Action::kCheat) ++c.neg;
  return c;
}

constexpr Action kActions[] = {Action::kCheat, Action::kAbstain, Action::kTruth};

std::optional<Deviation> deviation_with_counts(const StrategyProfile& profile, Counts c,
                                               const GameConfig& g) {
  for (std::size_t i = 0; i < profile.size(); ++i) {
    Action cur = profile[i];
    double v = g.integrity_costs[i];
    double now = payoff_from_counts(cur, v, c, g);
    for (Action alt : kActions) {
      if (alt == cur) continue;
      double then = payoff_from_counts(alt, v, with_action(c, cur, alt), g);
      if (strictly_better(then, now)) return Deviation{i, alt, then - now};
    }
  }
  return std::nullopt;
}

void check_profile(const StrategyProfile& profile, const GameConfig& g) {
  if (profile.size() != g.voters()) {
    throw Error(ErrorCode::kIndexOutOfRange, "profile length does not match voter count");
  }
}

}  // namespace

double payoff(std::size_t voter, const StrategyProfile& profile, const GameConfig& config) {
  check_profile(profile, config);
  if (voter >= profile.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "voter index " + std::to_string(voter));
  }
  return payoff_from_counts(profile[voter], config.integrity_costs[voter], count(profile), config);
}

bool is_sid(double integrity_cost, const GameConfig& config) {
  return integrity_cost > config.reward - config.vote_cost;
}

std::size_t count_sids(const GameConfig& config) {
  return static_cast<std::size_t>(std::count_if(config.integrity_costs.begin(),
                                                config.integrity_costs.end(),
                                                [&](double v) { return is_sid(v, config); }));
}

std::optional<Deviation> find_profitable_deviation(const StrategyProfile& profile,
                                                   const GameConfig& config) {
  check_profile(profile, config);
  return deviation_with_counts(profile, count(profile), config);
}

StrategyProfile all_cheat_profile(const GameConfig& config) {
  StrategyProfile p(config.voters(), Action::kCheat);
  if (count_sids(config) == config.voters()) return p;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (is_sid(config.integrity_costs[i], config)) p[i] = Action::kAbstain;
  }
  return p;
}

AllCheatVerdict all_cheat_is_pure_ne(const GameConfig& config) {
  config.validate();
  AllCheatVerdict v;
  std::size_t n = config.voters();
  v.closed_form_ne = n >= config.n_thld && count_sids(config) <= n - config.n_thld;
  v.witness = find_profitable_deviation(all_cheat_profile(config), config);
  v.deviation_check_ne = !v.witness;
  v.is_ne = v.deviation_check_ne;
  return v;
}

std::vector<StrategyProfile> enumerate_pure_ne(const GameConfig& config) {
  config.validate();
  std::size_t n = config.voters();
  if (n > kMaxEnumerationVoters) {
    throw Error(ErrorCode::kTooLarge, std::to_string(n) + " voters exceeds enumeration cap of " +
                                          std::to_string(kMaxEnumerationVoters));
  }
  std::vector<StrategyProfile> out;
  StrategyProfile p(n, Action::kCheat);
  Counts c{0, n};
  // Odometer over {-1, 0, 1}^n with the last voter varying fastest.
  while (true) {
    if (!deviation_with_counts(p, c, config)) out.push_back(p);
    std::size_t i = n;
    while (i > 0) {
      --i;
      Action next = p[i] == Action::kCheat ? Action::kAbstain
                    : p[i] == Action::kAbstain ? Action::kTruth
                                               : Action::kCheat;
      c = with_action(c, p[i], next);
      p[i] = next;
      if (next != Action::kCheat) break;
      if (i == 0) return out;
    }
    if (n == 0) return out;
  }
}

void OptInModel::validate() const {
  if (!(big_m > 0.0)) throw Error(ErrorCode::kConfigError, "optin.big_m must be > 0");
  if (!(vvmt_thld >= 0.0 && vvmt_thld <= big_m)) {
    throw Error(ErrorCode::kConfigError, "optin.vvmt_thld must be in [0, M]");
  }
  if (!(c_norm_per_vvmt >= 0.0 && c_adv_per_vvmt >= 0.0)) {
    throw Error(ErrorCode::kConfigError, "per-VVMT costs must be >= 0");
  }
}

double expected_payoff(const OptInModel& model, Role role) {
  double r = role == Role::kNormal ? model.r_norm : model.r_adv;
  double c = role == Role::kNormal ? model.c_norm_per_vvmt : model.c_adv_per_vvmt;
  return r - (c / 2.0) * (model.big_m + model.vvmt_thld);
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::kNormalDominates: return "a";
    case Regime::kCrossover: return "b";
    case Regime::kAdversaryDominates: return "c";
  }
  return "?";
}

CriticalThreshold critical_threshold(const OptInModel& model) {
  if (!(model.c_adv_per_vvmt > model.c_norm_per_vvmt)) {
    throw Error(ErrorCode::kInfeasible, "adversary cost per VVMT must exceed the normal cost");
  }
  double value = 2.0 * (model.r_adv - model.r_norm) /
                     (model.c_adv_per_vvmt - model.c_norm_per_vvmt) -
                 model.big_m;
  Regime regime = value <= 0.0           ? Regime::kNormalDominates
                  : value < model.big_m ? Regime::kCrossover
                                        : Regime::kAdversaryDominates;
  return {value, regime};
}

}  // namespace pot
