#include "pot/sim/config.hpp"

#include <cmath>
#include <set>

#include "pot/error.hpp"

namespace pot::sim {

using nlohmann::json;

SimConfig::SimConfig() {
  voting.n_thld = 5;
  voting.location_constraint_m = comm_range_m;
  voting.vvmt_params.form = VvmtForm::kVanillaLinear;
  voting.vvmt_params.gamma = 1.0;
  voting.vvmt_params.n_max = 1000;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::kConfigError, "field '" + path + "': " + msg);
}

// Reads the members of one JSON object, remembering which were consumed so
// the rest can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) fail(prefix_.empty() ? "<root>" : prefix_, "expected an object");
  }

  std::string path(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() || it->is_null() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) fail(path(key), "expected a number");
      out = v->get<double>();
    }
  }

  void optional_number(const std::string& key, std::optional<double>& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) fail(path(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <typename T>
  void integer(const std::string& key, T& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() &&
                                      v->get<std::int64_t>() < 0)) {
        fail(path(key), "expected a non-negative integer");
      }
      out = v->get<T>();
    }
  }

  void integer_signed(const std::string& key, std::int64_t& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) fail(path(key), "expected an integer");
      out = v->get<std::int64_t>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) fail(path(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  template <typename F>
  void string(const std::string& key, F&& apply) {
    if (const json* v = get(key)) {
      if (!v->is_string()) fail(path(key), "expected a string");
      try {
        apply(v->get<std::string>());
      } catch (const Error& e) {
        fail(path(key), e.what());
      }
    }
  }

  template <typename F>
  void object(const std::string& key, F&& read) {
    if (const json* v = get(key)) {
      ObjectReader sub(*v, path(key));
      read(sub);
      sub.finish();
    }
  }

  void number_list(const std::string& key, std::vector<double>& out) {
    if (const json* v = get(key)) {
      if (!v->is_array()) fail(path(key), "expected an array of numbers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) fail(path(key), "expected an array of numbers");
        out.push_back(x.get<double>());
      }
    }
  }

  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.contains(key)) fail(path(key), "unknown field");
    }
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::set<std::string> seen_;
};

void read_vvmt(ObjectReader& r, VvmtParams& p, DistanceMetric& metric) {
  r.string("form", [&](const std::string& s) { p.form = vvmt_form_from_string(s); });
  r.number("gamma", p.gamma);
  r.number("big_m", p.big_m);
  r.number("k", p.k);
  r.number("m_mid", p.m_mid);
  r.number("alpha", p.alpha);
  r.integer("n_max", p.n_max);
  r.boolean("bridge_gaps", p.bridge_gaps);
  r.string("metric", [&](const std::string& s) { metric.kind = distance_kind_from_string(s); });
}

}  // namespace

SimConfig config_from_json(const json& doc) {
  SimConfig c;
  ObjectReader r(doc, "");
  r.integer("seed", c.seed);
  r.number("duration_s", c.duration_s);
  r.number("drain_s", c.drain_s);
  r.number("corridor_length_miles", c.corridor_length_miles);
  r.number("rsu_spacing_miles", c.rsu_spacing_miles);
  r.number("comm_range_m", c.comm_range_m);
  // The location constraint follows the radio range unless set explicitly.
  c.voting.location_constraint_m = c.comm_range_m;
  r.optional_number("sensing_radius_m", c.sensing_radius_m);
  r.integer("max_vehicles", c.max_vehicles);
  r.number("vehicle_speed_mph", c.vehicle_speed_mph);
  r.number("min_speed_fraction", c.min_speed_fraction);
  r.number("traffic_density", c.traffic_density);
  r.number("malicious_fraction", c.malicious_fraction);
  r.number("event_rate", c.event_rate);
  r.number("false_event_rate", c.false_event_rate);
  r.number("vote_delay_mean_s", c.vote_delay_mean_s);
  r.integer("sybil_identities", c.sybil_identities);
  r.number("message_drop_probability", c.message_drop_probability);
  r.number("history_max_miles", c.history_max_miles);
  r.number("adversary_cost_ratio", c.adversary_cost_ratio);
  r.optional_number("target_p_sid", c.target_p_sid);
  r.number_list("eligibility_grid", c.eligibility_grid);
  r.object("voting", [&](ObjectReader& v) {
    v.string("mode", [&](const std::string& s) { c.voting.mode = voting_mode_from_string(s); });
    v.integer("n_thld", c.voting.n_thld);
    v.number("vvmt_thld", c.voting.vvmt_thld);
    v.number("location_constraint_m", c.voting.location_constraint_m);
  });
  r.object("vvmt", [&](ObjectReader& v) { read_vvmt(v, c.voting.vvmt_params, c.voting.metric); });
  r.object("policy", [&](ObjectReader& p) {
    p.integer_signed("validity_window_s", c.policy.validity_window_s);
    p.number("max_plausible_speed_mps", c.policy.max_plausible_speed_mps);
    p.integer("threshold_m", c.policy.threshold_m);
    p.number("heuristic_max_event_distance_m", c.policy.heuristic_max_event_distance_m);
    p.boolean("allow_gaps", c.policy.allow_gaps);
  });
  r.object("game", [&](ObjectReader& g) {
    g.number("reward", c.game.reward);
    g.number("punishment", c.game.punishment);
    g.number("vote_cost", c.game.vote_cost);
  });
  r.object("integrity_model", [&](ObjectReader& m) {
    m.number("beta", c.integrity_model.beta);
    m.number("honest_base_mean", c.integrity_model.honest_base_mean);
    m.number("honest_base_sd", c.integrity_model.honest_base_sd);
    m.number("malicious_base_mean", c.integrity_model.malicious_base_mean);
    m.number("malicious_base_sd", c.integrity_model.malicious_base_sd);
  });
  r.object("attack", [&](ObjectReader& a) {
    a.integer("instances", c.attack.instances);
    a.integer("chain_length", c.attack.chain_length);
    a.integer("coalition_size", c.attack.coalition_size);
    a.integer("coalition_chains", c.attack.coalition_chains);
    a.integer("sybils", c.attack.sybils);
    a.number("r_adv", c.attack.r_adv);
    a.number("c_adv_per_vvmt", c.attack.c_adv_per_vvmt);
  });
  r.finish();
  c.validate();
  return c;
}

json config_to_json(const SimConfig& c) {
  const VvmtParams& v = c.voting.vvmt_params;
  json doc = {
      {"seed", c.seed},
      {"duration_s", c.duration_s},
      {"drain_s", c.drain_s},
      {"corridor_length_miles", c.corridor_length_miles},
      {"rsu_spacing_miles", c.rsu_spacing_miles},
      {"comm_range_m", c.comm_range_m},
      {"sensing_radius_m", c.sensing_radius()},
      {"max_vehicles", c.max_vehicles},
      {"vehicle_speed_mph", c.vehicle_speed_mph},
      {"min_speed_fraction", c.min_speed_fraction},
      {"traffic_density", c.traffic_density},
      {"malicious_fraction", c.malicious_fraction},
      {"event_rate", c.event_rate},
      {"false_event_rate", c.false_event_rate},
      {"vote_delay_mean_s", c.vote_delay_mean_s},
      {"sybil_identities", c.sybil_identities},
      {"message_drop_probability", c.message_drop_probability},
      {"history_max_miles", c.history_max_miles},
      {"adversary_cost_ratio", c.adversary_cost_ratio},
      {"target_p_sid", c.target_p_sid ? json(*c.target_p_sid) : json(nullptr)},
      {"eligibility_grid", c.eligibility_grid},
      {"voting",
       {{"mode", to_string(c.voting.mode)},
        {"n_thld", c.voting.n_thld},
        {"vvmt_thld", c.voting.vvmt_thld},
        {"location_constraint_m", c.voting.location_constraint_m}}},
      {"vvmt",
       {{"form", to_string(v.form)},
        {"gamma", v.gamma},
        {"big_m", v.big_m},
        {"k", v.k},
        {"m_mid", v.m_mid},
        {"alpha", v.alpha},
        {"n_max", v.n_max},
        {"bridge_gaps", v.bridge_gaps},
        {"metric", to_string(c.voting.metric.kind)}}},
      {"policy",
       {{"validity_window_s", c.policy.validity_window_s},
        {"max_plausible_speed_mps", c.policy.max_plausible_speed_mps},
        {"threshold_m", c.policy.threshold_m},
        {"heuristic_max_event_distance_m", c.policy.heuristic_max_event_distance_m},
        {"allow_gaps", c.policy.allow_gaps}}},
      {"game",
       {{"reward", c.game.reward}, {"punishment", c.game.punishment},
        {"vote_cost", c.game.vote_cost}}},
      {"integrity_model",
       {{"beta", c.integrity_model.beta},
        {"honest_base_mean", c.integrity_model.honest_base_mean},
        {"honest_base_sd", c.integrity_model.honest_base_sd},
        {"malicious_base_mean", c.integrity_model.malicious_base_mean},
        {"malicious_base_sd", c.integrity_model.malicious_base_sd}}},
      {"attack",
       {{"instances", c.attack.instances},
        {"chain_length", c.attack.chain_length},
        {"coalition_size", c.attack.coalition_size},
        {"coalition_chains", c.attack.coalition_chains},
        {"sybils", c.attack.sybils},
        {"r_adv", c.attack.r_adv},
        {"c_adv_per_vvmt", c.attack.c_adv_per_vvmt}}},
  };
  return doc;
}

void SimConfig::validate() const {
  auto positive = [](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(name, "must be a positive number");
  };
  auto non_negative = [](const char* name, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(name, "must be >= 0");
  };
  auto fraction = [](const char* name, double v) {
    if (!(v >= 0.0 && v <= 1.0)) fail(name, "must be in [0, 1]");
  };
  positive("duration_s", duration_s);
  non_negative("drain_s", drain_s);
  positive("corridor_length_miles", corridor_length_miles);
  positive("rsu_spacing_miles", rsu_spacing_miles);
  positive("comm_range_m", comm_range_m);
  positive("sensing_radius_m", sensing_radius());
  if (max_vehicles == 0) fail("max_vehicles", "must be >= 1");
  positive("vehicle_speed_mph", vehicle_speed_mph);
  if (!(min_speed_fraction > 0.0 && min_speed_fraction <= 1.0)) {
    fail("min_speed_fraction", "must be in (0, 1]");
  }
  non_negative("traffic_density", traffic_density);
  fraction("malicious_fraction", malicious_fraction);
  non_negative("event_rate", event_rate);
  non_negative("false_event_rate", false_event_rate);
  non_negative("vote_delay_mean_s", vote_delay_mean_s);
  fraction("message_drop_probability", message_drop_probability);
  non_negative("history_max_miles", history_max_miles);
  positive("adversary_cost_ratio", adversary_cost_ratio);
  if (target_p_sid) fraction("target_p_sid", *target_p_sid);
  if (comm_range_m * 2.0 > miles_to_meters(rsu_spacing_miles)) {
    fail("comm_range_m", "RSU ranges must not overlap (2 * comm_range_m <= rsu spacing)");
  }
  for (double t : eligibility_grid) {
    if (!(t >= 0.0)) fail("eligibility_grid", "thresholds must be >= 0");
  }
  if (!(game.reward > game.vote_cost)) fail("game.reward", "must exceed game.vote_cost");
  positive("integrity_model.beta", integrity_model.beta);
  non_negative("integrity_model.honest_base_sd", integrity_model.honest_base_sd);
  non_negative("integrity_model.malicious_base_sd", integrity_model.malicious_base_sd);
  try {
    voting.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, std::string("voting/vvmt: ") + e.what());
  }
  try {
    policy.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, std::string("policy: ") + e.what());
  }
}

void set_config_field(json& doc, const std::string& path, const json& value) {
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    std::size_t dot = path.find('.', start);
    std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

}  // namespace pot::sim
