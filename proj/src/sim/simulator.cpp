#include "pot/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <tuple>

#include "json.hpp"
#include "pot/error.hpp"
#include "pot/sim/random.hpp"
#include "pot/vvmt.hpp"

namespace pot::sim {

namespace {

// keyed-draw tags
enum : std::uint64_t {
  kTagRsuKey = 1,
  kTagVehicleKey = 2,
  kTagSybilKey = 3,
  kTagDropPass = 4,
  kTagDropVote = 5,
  kTagDelay = 6,
};

// sequential streams
enum : std::uint64_t {
  kStreamPopulation = 1,
  kStreamTrueEvents = 2,
  kStreamFalseEvents = 3,
};

constexpr double kGridEps = 1e-9;

double horizon_of(const SimConfig& c) { return c.duration_s + c.drain_s; }

std::int64_t stamp(double t) { return kEpoch + static_cast<std::int64_t>(std::floor(t)); }

}  // namespace

std::string_view to_string(AgentRole role) {
  switch (role) {
    case AgentRole::kHonest: return "honest";
    case AgentRole::kMalicious: return "malicious";
    case AgentRole::kColluding: return "colluding";
  }
  return "unknown";
}

Highway::Highway(const SimConfig& config) {
  config.validate();
  length_m_ = miles_to_meters(config.corridor_length_miles);
  spacing_m_ = miles_to_meters(config.rsu_spacing_miles);
  double reach = miles_to_meters(config.history_max_miles) + spacing_m_;
  k_min_ = -static_cast<std::int64_t>(std::ceil(reach / spacing_m_));
  auto k_max = static_cast<std::int64_t>(std::ceil((length_m_ + reach) / spacing_m_));
  for (std::int64_t k = k_min_; k <= k_max; ++k) {
    std::size_t i = rsus_.size();
    double x = static_cast<double>(k) * spacing_m_;
    KeyPair keys = generate_keypair(seed_from_u64(key_hash({config.seed, kTagRsuKey, i})));
    Position pos = Position::from_meters(x);
    registry_.add(keys.public_key(), pos, x);
    rsus_.push_back({std::move(keys), pos});
    if (x >= -kGridEps && x <= length_m_ + kGridEps) corridor_.push_back(i);
  }
  for (std::size_t i = 0; i < rsus_.size(); ++i) {
    for (std::size_t j = i + 1; j <= i + 2 && j < rsus_.size(); ++j) {
      registry_.connect(rsus_[i].keys.public_key(), rsus_[j].keys.public_key());
    }
  }
}

std::vector<Pass> passes_of(const VehicleAgent& a, const Highway& hw, const SimConfig& config) {
  double start = a.entry_x_m - a.direction * miles_to_meters(a.prior_miles);
  double end = a.direction > 0 ? hw.length_m() : 0.0;
  double lo = std::min(start, end), hi = std::max(start, end);
  auto k_lo = static_cast<std::int64_t>(std::ceil(lo / hw.spacing_m() - kGridEps));
  auto k_hi = static_cast<std::int64_t>(std::floor(hi / hw.spacing_m() + kGridEps));
  k_lo = std::max(k_lo, hw.first_grid_index());
  k_hi = std::min(k_hi, hw.first_grid_index() + static_cast<std::int64_t>(hw.size()) - 1);

  std::vector<Pass> out;
  for (std::int64_t n = 0; n <= k_hi - k_lo; ++n) {
    std::int64_t k = a.direction > 0 ? k_lo + n : k_hi - n;
    double x = static_cast<double>(k) * hw.spacing_m();
    Pass p;
    p.rsu = static_cast<std::size_t>(k - hw.first_grid_index());
    p.time_s = a.entry_time_s + (x - a.entry_x_m) * a.direction / a.speed_mps;
    if (config.message_drop_probability > 0.0) {
      double u = unit_interval(key_hash({config.seed, kTagDropPass, a.id, out.size()}));
      p.dropped = u < config.message_drop_probability;
    }
    out.push_back(p);
  }
  return out;
}

double vvmt_at(const std::vector<Pass>& passes, double t, const Highway& hw,
               const VotingConfig& voting) {
  double miles = 0.0;
  const Pass* prev = nullptr;
  bool gap = false;
  std::size_t n = 0;
  for (const Pass& p : passes) {
    if (p.time_s > t) break;
    if (p.dropped) {
      gap = true;
      continue;
    }
    if (prev && (voting.vvmt_params.bridge_gaps || !gap)) {
      const RsuIdentity& a = hw.rsu(prev->rsu);
      const RsuIdentity& b = hw.rsu(p.rsu);
      if (voting.metric.kind == DistanceKind::kEuclidean) {
        miles += meters_to_miles(distance_m(a.position, b.position));
      } else {
        const RsuInfo* ia = hw.registry().find(a.keys.public_key());
        const RsuInfo* ib = hw.registry().find(b.keys.public_key());
        miles += meters_to_miles(std::abs(ia->milepost_m - ib->milepost_m));
      }
    }
    prev = &p;
    gap = false;
    ++n;
  }
  return score_from_distance(miles, n, voting.vvmt_params);
}

std::vector<VehicleAgent> generate_population(const SimConfig& c, const Highway& hw) {
  std::mt19937_64 rng = make_stream(c.seed, kStreamPopulation);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double v_max = c.vehicle_speed_mph * kMetersPerSecondPerMph;
  double v_min = v_max * c.min_speed_fraction;
  double horizon = horizon_of(c);

  std::vector<VehicleAgent> out;
  // exit times of admitted vehicles, for the max_vehicles cap
  std::priority_queue<double, std::vector<double>, std::greater<>> exits;

  auto admit = [&](double t0, double x0, int dir) {
    while (!exits.empty() && exits.top() < t0) exits.pop();
    if (exits.size() >= c.max_vehicles) return;
    VehicleAgent a;
    a.id = out.size();
    a.direction = dir;
    a.entry_time_s = t0;
    a.entry_x_m = x0;
    a.speed_mps = v_min == v_max ? v_max : std::uniform_real_distribution<double>(v_min, v_max)(rng);
    double to_end = dir > 0 ? hw.length_m() - x0 : x0;
    a.exit_time_s = t0 + to_end / a.speed_mps;
    a.role = unit(rng) < c.malicious_fraction ? AgentRole::kMalicious : AgentRole::kHonest;

    double h = c.history_max_miles;
    if (a.malicious()) {
      std::exponential_distribution<double> prior(2.0 * c.adversary_cost_ratio / h);
      do {
        a.prior_miles = prior(rng);
      } while (a.prior_miles > h);
    } else {
      a.prior_miles = std::uniform_real_distribution<double>(0.0, h)(rng);
    }

    const IntegrityModel& im = c.integrity_model;
    double base = a.malicious()
                      ? -std::abs(std::normal_distribution<double>(im.malicious_base_mean,
                                                                   im.malicious_base_sd)(rng))
                      : std::normal_distribution<double>(im.honest_base_mean, im.honest_base_sd)(rng);

    std::vector<Pass> passes = passes_of(a, hw, c);
    double before_entry = std::nextafter(t0, -std::numeric_limits<double>::infinity());
    try {
      a.prior_vvmt = vvmt_at(passes, before_entry, hw, c.voting);
    } catch (const Error&) {
      a.prior_vvmt = 0.0;  // resilient form with more passes than n_max
    }
    a.integrity_cost = base + im.beta * a.prior_vvmt;
    a.sid = a.integrity_cost > c.game.reward - c.game.vote_cost;

    exits.push(a.exit_time_s);
    out.push_back(a);
  };

  std::poisson_distribution<long> initial(c.traffic_density * c.corridor_length_miles);
  long n0 = initial(rng);
  for (long i = 0; i < n0; ++i) {
    int dir = unit(rng) < 0.5 ? 1 : -1;
    double x0 = unit(rng) * hw.length_m();
    admit(0.0, x0, dir);
  }

  // Per-direction flow q = k / E[1/v] keeps density k under uniform speeds.
  double k_per_m = c.traffic_density / 2.0 / kMetersPerMile;
  double mean_slowness = v_min == v_max ? 1.0 / v_max : std::log(v_max / v_min) / (v_max - v_min);
  double flow = k_per_m / mean_slowness;
  std::vector<std::pair<double, int>> arrivals;
  for (int dir : {1, -1}) {
    std::exponential_distribution<double> gap(flow);
    for (double t = gap(rng); t < horizon; t += gap(rng)) arrivals.emplace_back(t, dir);
  }
  std::sort(arrivals.begin(), arrivals.end());
  for (const auto& [t, dir] : arrivals) admit(t, dir > 0 ? 0.0 : hw.length_m(), dir);
  return out;
}

std::size_t eligible_count(const std::vector<VehicleAgent>& agents, double threshold) {
  return static_cast<std::size_t>(std::count_if(
      agents.begin(), agents.end(), [&](const VehicleAgent& a) { return a.prior_vvmt >= threshold; }));
}

std::vector<EligibilityPoint> eligibility_table(const std::vector<VehicleAgent>& agents,
                                                const std::vector<double>& grid) {
  std::vector<EligibilityPoint> out;
  for (double thld : grid) {
    EligibilityPoint e;
    e.threshold = thld;
    for (const auto& a : agents) {
      if (a.prior_vvmt < thld) continue;
      ++e.eligible;
      if (a.sid) ++e.sids;
    }
    e.p_sid = e.eligible ? static_cast<double>(e.sids) / static_cast<double>(e.eligible) : 0.0;
    out.push_back(e);
  }
  return out;
}

bool p_sid_non_decreasing(const std::vector<EligibilityPoint>& table) {
  std::vector<EligibilityPoint> sorted = table;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.threshold < b.threshold; });
  double last = -1.0;
  for (const auto& e : sorted) {
    if (e.eligible == 0) continue;
    if (e.p_sid < last) return false;
    last = e.p_sid;
  }
  return true;
}

std::optional<double> threshold_for_p_sid(const std::vector<VehicleAgent>& agents, double target) {
  std::vector<const VehicleAgent*> order;
  for (const auto& a : agents) order.push_back(&a);
  std::sort(order.begin(), order.end(),
            [](const auto* a, const auto* b) { return a->prior_vvmt > b->prior_vvmt; });
  std::optional<double> best;
  std::size_t sids = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i]->sid) ++sids;
    // only cut between distinct values, ties are admitted together
    if (i + 1 < order.size() && order[i + 1]->prior_vvmt == order[i]->prior_vvmt) continue;
    if (static_cast<double>(sids) >= target * static_cast<double>(i + 1)) best = order[i]->prior_vvmt;
  }
  return best;
}

double threshold_for_eligible_count(const std::vector<VehicleAgent>& agents, std::size_t count) {
  if (count == 0 || agents.empty()) return std::numeric_limits<double>::infinity();
  std::vector<double> v;
  for (const auto& a : agents) v.push_back(a.prior_vvmt);
  std::sort(v.begin(), v.end(), std::greater<>());
  return v[std::min(count, v.size()) - 1];
}

namespace {

struct EventSpec {
  double time_s = 0.0;
  double site_m = 0.0;
  EventType type = EventType::kIncident;
  bool truth = true;
  std::optional<std::size_t> injector;
};

struct SessionState {
  std::size_t event = 0;
  std::size_t rsu = 0;
  double open_s = 0.0;
  double lo_m = 0.0, hi_m = 0.0;  // where a vehicle can observe the event
  VotingSession voting;
  std::optional<double> decided_at;
};

struct Intent {
  double t = 0.0;
  std::size_t session = 0;
  std::size_t vehicle = 0;
  std::size_t sybil = 0;  // 0: the vehicle's own key

  bool operator<(const Intent& o) const {
    return std::tie(t, session, vehicle, sybil) < std::tie(o.t, o.session, o.vehicle, o.sybil);
  }
};

struct VehicleState {
  std::vector<Pass> passes;
  std::optional<KeyPair> keys;
  ProofChain chain;
  std::size_t materialized = 0;
};

class Runner {
 public:
  Runner(const SimConfig& config, const RunOptions& options)
      : c_(config),
        opts_(options),
        hw_(config),
        agents_(generate_population(config, hw_)),
        states_(agents_.size()),
        verifier_(hw_.registry(), config.policy) {}

  RunResult run();

 private:
  void calibrate();
  void make_events();
  void open_sessions();
  void collect_intents();
  void process();
  void finish();

  VehicleState& state(std::size_t v);
  const KeyPair& keys_for(std::size_t v, std::size_t sybil);
  void extend_chain(std::size_t v, double t);
  void emit(nlohmann::json line) {
    if (opts_.trace) out_.trace.push_back(line.dump());
  }

  const SimConfig& c_;
  RunOptions opts_;
  Highway hw_;
  std::vector<VehicleAgent> agents_;
  std::vector<VehicleState> states_;
  std::map<std::pair<std::size_t, std::size_t>, KeyPair> sybil_keys_;
  ChainVerifier verifier_;
  VotingConfig voting_;
  std::vector<EventSpec> events_;
  std::vector<SessionState> sessions_;
  std::vector<Intent> intents_;
  RunResult out_;
};

VehicleState& Runner::state(std::size_t v) {
  VehicleState& s = states_[v];
  if (s.passes.empty() && s.materialized == 0) s.passes = passes_of(agents_[v], hw_, c_);
  return s;
}

const KeyPair& Runner::keys_for(std::size_t v, std::size_t sybil) {
  if (sybil == 0) {
    VehicleState& s = state(v);
    if (!s.keys) s.keys = generate_keypair(seed_from_u64(key_hash({c_.seed, kTagVehicleKey, v})));
    return *s.keys;
  }
  auto key = std::make_pair(v, sybil);
  auto it = sybil_keys_.find(key);
  if (it == sybil_keys_.end()) {
    it = sybil_keys_
             .emplace(key, generate_keypair(seed_from_u64(key_hash({c_.seed, kTagSybilKey, v, sybil}))))
             .first;
  }
  return it->second;
}

// Collects signatures for every pass up to time t. History passes (before the
// vehicle entered the corridor) are sealed directly; corridor passes go
// through the issuing RSU's checks.
void Runner::extend_chain(std::size_t v, double t) {
  VehicleState& s = state(v);
  const KeyPair& keys = keys_for(v, 0);
  const VehicleAgent& a = agents_[v];
  while (s.materialized < s.passes.size() && s.passes[s.materialized].time_s <= t) {
    const Pass& p = s.passes[s.materialized++];
    if (p.dropped) {
      s.chain.append_gap();
      continue;
    }
    const LocationSignature* last =
        s.chain.empty() ? nullptr : std::get_if<LocationSignature>(&s.chain.entries.back());
    const RsuIdentity& rsu = hw_.rsu(p.rsu);
    std::int64_t ts = stamp(p.time_s);
    if (p.time_s < a.entry_time_s) {
      s.chain.append(seal_signature(rsu, keys.public_key(), ts, Digest{},
                                    last ? link_hash(*last) : Digest{}));
      continue;
    }
    std::optional<LocationSignature> prev;
    if (last) prev = *last;
    try {
      auto req = make_request(keys, ts, std::nullopt, rsu.position, prev);
      s.chain.append(issue_signature(rsu, hw_.registry(), req, c_.policy, ts));
    } catch (const Error&) {
      if (!prev) throw;
      // start a fresh link after a refused request
      auto req = make_request(keys, ts, std::nullopt, rsu.position, std::nullopt);
      s.chain.append(issue_signature(rsu, hw_.registry(), req, c_.policy, ts));
    }
  }
}

void Runner::calibrate() {
  voting_ = c_.voting;
  SimMetrics& m = out_.metrics;
  if (c_.target_p_sid) {
    auto thld = threshold_for_p_sid(agents_, *c_.target_p_sid);
    if (!thld) {
      double top = 0.0;
      for (const auto& a : agents_) top = std::max(top, a.prior_vvmt);
      thld = top;
    }
    voting_.vvmt_thld = *thld;
  }
  m.vvmt_thld = voting_.vvmt_thld;
  m.eligibility = eligibility_table(agents_, c_.eligibility_grid);
  m.p_sid_monotone = p_sid_non_decreasing(m.eligibility);
  std::size_t sids = 0;
  for (const auto& a : agents_) sids += a.sid;
  m.vehicles = agents_.size();
  m.malicious_vehicles = static_cast<std::size_t>(
      std::count_if(agents_.begin(), agents_.end(), [](const auto& a) { return a.malicious(); }));
  m.p_sid_population = agents_.empty() ? 0.0 : static_cast<double>(sids) / agents_.size();
  auto at = eligibility_table(agents_, {voting_.vvmt_thld});
  m.eligible_population = at[0].eligible;
  m.p_sid_eligible = at[0].p_sid;
}

void Runner::make_events() {
  const auto& corridor = hw_.corridor();
  double range = c_.comm_range_m;
  std::vector<EventSpec> all;

  std::mt19937_64 rng = make_stream(c_.seed, kStreamTrueEvents);
  if (c_.event_rate > 0.0 && !corridor.empty()) {
    std::exponential_distribution<double> gap(c_.event_rate / 60.0);
    std::uniform_int_distribution<std::size_t> pick(0, corridor.size() - 1);
    std::uniform_real_distribution<double> offset(-range, range);
    std::uniform_int_distribution<int> type(0, 3);
    for (double t = gap(rng); t < c_.duration_s; t += gap(rng)) {
      EventSpec e;
      e.time_s = t;
      double x = hw_.x_m(corridor[pick(rng)]) + offset(rng);
      e.site_m = std::clamp(x, 0.0, hw_.length_m());
      e.type = static_cast<EventType>(type(rng));
      all.push_back(e);
    }
  }

  std::mt19937_64 frng = make_stream(c_.seed, kStreamFalseEvents);
  if (c_.false_event_rate > 0.0 && c_.malicious_fraction > 0.0) {
    std::exponential_distribution<double> gap(c_.false_event_rate / 60.0);
    std::uniform_int_distribution<int> type(0, 3);
    for (double t = gap(frng); t < c_.duration_s; t += gap(frng)) {
      std::vector<std::size_t> candidates;
      for (const auto& a : agents_) {
        if (!a.malicious() || !a.active(t)) continue;
        double x = a.position_m(t);
        for (std::size_t r : corridor) {
          if (std::abs(x - hw_.x_m(r)) <= range) {
            candidates.push_back(a.id);
            break;
          }
        }
      }
      if (candidates.empty()) {
        ++out_.metrics.false_events_skipped;
        continue;
      }
      std::size_t who = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(frng)];
      EventSpec e;
      e.time_s = t;
      e.site_m = agents_[who].position_m(t);
      e.type = static_cast<EventType>(type(frng));
      e.truth = false;
      e.injector = who;
      all.push_back(e);
    }
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.time_s < b.time_s; });
  events_ = std::move(all);
  for (const auto& e : events_) ++(e.truth ? out_.metrics.true_events : out_.metrics.false_events);
}

void Runner::open_sessions() {
  double range = c_.comm_range_m;
  double sense = c_.sensing_radius();
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const EventSpec& e = events_[i];
    nlohmann::json ev{{"kind", "event"},     {"event", i},
                      {"t", e.time_s},       {"site_m", e.site_m},
                      {"type", to_string(e.type)}, {"truth", e.truth}};
    ev["injector"] = e.injector ? nlohmann::json(*e.injector) : nlohmann::json(nullptr);
    emit(std::move(ev));
    for (std::size_t r : hw_.corridor()) {
      double x = hw_.x_m(r);
      if (std::abs(e.site_m - x) > range) continue;
      SessionState s{i,
                     r,
                     e.time_s,
                     std::max({x - range, e.site_m - sense, 0.0}),
                     std::min({x + range, e.site_m + sense, hw_.length_m()}),
                     VotingSession(i, e.type, hw_.rsu(r).keys.public_key()),
                     std::nullopt};
      emit({{"kind", "session"}, {"session", sessions_.size()}, {"event", i}, {"rsu", r}});
      sessions_.push_back(std::move(s));
    }
  }
  out_.metrics.sessions_opened = sessions_.size();
}

void Runner::collect_intents() {
  double horizon = horizon_of(c_);
  std::exponential_distribution<double> delay(1.0 / c_.vote_delay_mean_s);
  auto draw_delay = [&](std::size_t s, std::size_t v, std::size_t sybil) {
    if (c_.vote_delay_mean_s <= 0.0) return 0.0;
    SplitMix64 g(key_hash({c_.seed, kTagDelay, s, v, sybil}));
    return delay(g);
  };

  for (std::size_t si = 0; si < sessions_.size(); ++si) {
    const SessionState& s = sessions_[si];
    const EventSpec& e = events_[s.event];
    for (const VehicleAgent& a : agents_) {
      if (a.exit_time_s < s.open_s) continue;
      double t_lo = a.entry_time_s + (s.lo_m - a.entry_x_m) * a.direction / a.speed_mps;
      double t_hi = a.entry_time_s + (s.hi_m - a.entry_x_m) * a.direction / a.speed_mps;
      double ta = std::max(std::min(t_lo, t_hi), a.entry_time_s);
      double tb = std::min(std::max(t_lo, t_hi), a.exit_time_s);
      if (ta > tb || tb < s.open_s) continue;
      double t_obs = std::max(ta, s.open_s);
      std::size_t identities = a.malicious() ? 1 + c_.sybil_identities : 1;
      for (std::size_t k = 0; k < identities; ++k) {
        bool reporter = e.injector == a.id && k == 0;
        double tv = reporter ? s.open_s : t_obs + draw_delay(si, a.id, k);
        if (tv > a.exit_time_s || tv >= horizon) continue;
        intents_.push_back({tv, si, a.id, k});
      }
    }
  }
  std::sort(intents_.begin(), intents_.end());
}

void Runner::process() {
  bool ppv = voting_.mode == VotingMode::kPpv;
  SimMetrics& m = out_.metrics;
  out_.vote_log.n_thld = voting_.n_thld;
  out_.vote_log.mode = voting_.mode;

  for (const Intent& in : intents_) {
    SessionState& s = sessions_[in.session];
    if (s.voting.closed()) continue;
    const VehicleAgent& a = agents_[in.vehicle];
    const EventSpec& e = events_[s.event];

    // honest vehicles below the bar know they would be refused
    if (ppv && !a.malicious()) {
      double own;
      try {
        own = vvmt_at(state(a.id).passes, in.t, hw_, voting_);
      } catch (const Error&) {
        own = 0.0;
      }
      if (own < voting_.vvmt_thld) {
        ++m.abstentions;
        continue;
      }
    }
    if (c_.message_drop_probability > 0.0 &&
        unit_interval(key_hash({c_.seed, kTagDropVote, in.session, in.vehicle, in.sybil})) <
            c_.message_drop_probability) {
      ++m.votes_dropped;
      continue;
    }

    std::int8_t value = e.truth != a.malicious() ? 1 : -1;
    std::optional<ProofChain> proof;
    if (ppv && in.sybil == 0) {
      extend_chain(a.id, in.t);
      const VehicleState& st = states_[a.id];
      auto upto = std::upper_bound(st.passes.begin(), st.passes.end(), in.t,
                                   [](double t, const Pass& p) { return t < p.time_s; });
      auto n = static_cast<std::size_t>(upto - st.passes.begin());
      if (n > 0) {
        proof = ProofChain{};
        proof->entries.assign(st.chain.entries.begin(), st.chain.entries.begin() + static_cast<long>(n));
      }
    }
    Vote vote = make_vote(keys_for(a.id, in.sybil), s.event, e.type, value, stamp(in.t),
                          Position::from_meters(a.position_m(in.t)), std::move(proof));
    SessionUpdate up = ppv ? submit_vote_ppv(s.voting, vote, voting_, hw_.registry(), c_.policy,
                                             &verifier_)
                           : submit_vote_cpv(s.voting, vote, voting_, hw_.registry());
    ++m.votes_submitted;
    if (up.accepted) {
      ++m.votes_accepted;
    } else if (up.reject_reason) {
      auto idx = std::find(kRejectReasons.begin(), kRejectReasons.end(), *up.reject_reason) -
                 kRejectReasons.begin();
      ++m.rejections[static_cast<std::size_t>(idx)];
    }

    if (opts_.trace) {
      nlohmann::json line{{"kind", "vote"},       {"t", in.t},
                          {"session", in.session}, {"vehicle", in.vehicle},
                          {"sybil", in.sybil},     {"role", to_string(a.role)},
                          {"value", value},        {"accepted", up.accepted},
                          {"n_vo", up.n_vo}};
      line["reason"] = up.reject_reason ? nlohmann::json(to_string(*up.reject_reason))
                                        : nlohmann::json(nullptr);
      line["vvmt"] = up.vvmt ? nlohmann::json(*up.vvmt) : nlohmann::json(nullptr);
      emit(std::move(line));
      VoteLogRecord rec = make_log_record(s.voting, vote, up);
      rec.session = in.session;
      out_.vote_log.records.push_back(std::move(rec));
    }

    if (up.decision) {
      s.decided_at = in.t;
      emit({{"kind", "decision"},
            {"t", in.t},
            {"session", in.session},
            {"value", up.decision->value},
            {"reason", to_string(up.decision->reason)},
            {"delay_s", in.t - s.open_s}});
    }
  }
}

void Runner::finish() {
  SimMetrics& m = out_.metrics;
  double delay_sum = 0.0;
  for (const SessionState& s : sessions_) {
    bool truth = events_[s.event].truth;
    const auto& outcome = s.voting.outcome();
    if (!outcome) {
      if (truth) {
        ++m.missed_true;
        ++m.undecided_true;
      } else {
        ++m.undecided_false;
      }
      continue;
    }
    ++m.decided_sessions;
    delay_sum += *s.decided_at - s.open_s;
    bool confirmed = outcome->value > 0;
    if (truth) {
      ++(confirmed ? m.confirmed_true : m.missed_true);
    } else {
      ++(confirmed ? m.confirmed_false : m.rejected_false);
    }
  }
  m.decisions_total = m.confirmed_true + m.missed_true + m.confirmed_false + m.rejected_false;
  m.invalid_proportion =
      m.decisions_total ? static_cast<double>(m.confirmed_false + m.missed_true) / m.decisions_total
                        : 0.0;
  m.mean_confirmation_delay = m.decided_sessions ? delay_sum / m.decided_sessions : 0.0;
  m.throughput = static_cast<double>(m.confirmed_true) / (c_.duration_s / 60.0);

  nlohmann::json summary{{"kind", "summary"}};
  auto names = metrics_columns();
  auto values = metrics_values(m);
  for (std::size_t i = 0; i < names.size(); ++i) summary[names[i]] = values[i];
  emit(std::move(summary));
}

RunResult Runner::run() {
  out_.metrics.seed = c_.seed;
  calibrate();
  emit({{"kind", "run"},
        {"seed", c_.seed},
        {"mode", to_string(voting_.mode)},
        {"n_thld", voting_.n_thld},
        {"vvmt_thld", voting_.vvmt_thld},
        {"vehicles", agents_.size()}});
  make_events();
  open_sessions();
  collect_intents();
  process();
  finish();
  return std::move(out_);
}

}  // namespace

RunResult run(const SimConfig& config, const RunOptions& options) {
  config.validate();
  Runner runner(config, options);
  return runner.run();
}

}  // namespace pot::sim
