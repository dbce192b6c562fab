#include "pot/cli/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pot/chain_io.hpp"
#include "pot/cli/manifest.hpp"
#include "pot/cli/svg.hpp"
#include "pot/error.hpp"
#include "pot/game.hpp"
#include "pot/sim/attack.hpp"
#include "pot/sim/simulator.hpp"
#include "pot/sim/sweep.hpp"
#include "pot/vote_log.hpp"
#include "pot/vvmt.hpp"

namespace pot::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  Bytes b = read_file(p);
  return std::string(b.begin(), b.end());
}

json load_json(const fs::path& p) {
  std::string text = slurp(p);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, p.string() + ": " + e.what());
  }
}

ProofChain load_chain(const fs::path& p) {
  Bytes b = read_file(p);
  if (b.size() >= 4 && std::string(b.begin(), b.begin() + 4) == "POTC") return decode_chain_file(b);
  try {
    return chain_from_json(json::parse(b.begin(), b.end()));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, p.string() + ": neither a POTC file nor JSON");
  }
}

fs::path default_registry(const fs::path& chain) {
  fs::path r = chain;
  r.replace_extension(".registry.json");
  return r;
}

void save_chain(const fs::path& p, const ProofChain& chain) {
  if (p.extension() == ".json") {
    write_text(p, chain_to_json(chain).dump(2) + "\n");
  } else {
    write_chain_file(p, chain);
  }
}

// ---- keygen / issue -------------------------------------------------------

int cmd_keygen(std::uint64_t seed, const std::string& out_path, std::ostream& out) {
  KeyPair k = generate_keypair(seed_from_u64(seed));
  json doc{{"seed", seed},
           {"public_key", to_hex(k.public_key())},
           {"secret_key", to_hex(ByteView(k.secret_key()))}};
  if (out_path.empty()) {
    out << doc.dump(2) << "\n";
  } else {
    write_text(out_path, doc.dump(2) + "\n");
    out << "public_key " << to_hex(k.public_key()) << "\n";
  }
  return kExitOk;
}

struct IssueArgs {
  std::uint64_t seed = 0;
  std::size_t length = 3;
  double spacing_miles = 5.0;
  std::int64_t hop_s = 300;
  std::int64_t start_time = 1'700'000'000;
  std::string out;
  std::string registry;
  std::vector<std::string> tamper;  // index:field
  std::vector<std::size_t> gaps;
};

void apply_tamper(ProofChain& chain, const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "--tamper expects INDEX:FIELD, got '" + spec + "'");
  }
  std::size_t index = std::stoul(spec.substr(0, colon));
  std::string field = spec.substr(colon + 1);
  if (index >= chain.size()) throw Error(ErrorCode::kIndexOutOfRange, "--tamper index " + spec);
  auto* sig = std::get_if<LocationSignature>(&chain.entries[index]);
  if (!sig) throw Error(ErrorCode::kInvalidArgument, "entry " + std::to_string(index) + " is a gap");
  if (field == "rsu_public_key") sig->rsu_public_key.bytes[0] ^= 1;
  else if (field == "vehicle_public_key") sig->vehicle_public_key.bytes[0] ^= 1;
  else if (field == "timestamp") sig->timestamp += 1;
  else if (field == "event_hash") sig->event_hash.bytes[0] ^= 1;
  else if (field == "previous_hash") sig->previous_hash.bytes[0] ^= 1;
  else if (field == "rsu_signature") sig->rsu_signature.bytes[0] ^= 1;
  else if (field == "rsu_position") sig->rsu_position->x_mm += 1;
  else throw Error(ErrorCode::kInvalidArgument, "unknown field '" + field + "'");
}

int cmd_issue(const IssueArgs& a, std::ostream& out) {
  if (a.length == 0) throw Error(ErrorCode::kInvalidArgument, "--length must be >= 1");
  std::set<std::size_t> gaps(a.gaps.begin(), a.gaps.end());
  double spacing_m = miles_to_meters(a.spacing_miles);
  RsuRegistry registry;
  std::vector<RsuIdentity> rsus;
  for (std::size_t i = 0; i < a.length; ++i) {
    KeyPair k = generate_keypair(seed_from_u64(a.seed * 1'000'003ULL + 1 + i));
    Position pos = Position::from_meters(spacing_m * static_cast<double>(i));
    registry.add(k.public_key(), pos, spacing_m * static_cast<double>(i));
    if (i > 0) registry.connect(rsus.back().keys.public_key(), k.public_key());
    rsus.push_back({std::move(k), pos});
  }
  KeyPair vehicle = generate_keypair(seed_from_u64(a.seed));
  VerificationPolicy policy;
  policy.validity_window_s = std::max<std::int64_t>(policy.validity_window_s, 2 * a.hop_s);
  ProofChain chain;
  for (std::size_t i = 0; i < a.length; ++i) {
    if (gaps.contains(i)) {
      chain.append_gap();
      continue;
    }
    std::int64_t t = a.start_time + static_cast<std::int64_t>(i) * a.hop_s;
    std::optional<LocationSignature> prev;
    if (!chain.empty()) {
      if (const auto* last = std::get_if<LocationSignature>(&chain.entries.back())) prev = *last;
    }
    auto req = make_request(vehicle, t, std::nullopt, rsus[i].position, prev);
    chain.append(issue_signature(rsus[i], registry, req, policy, t));
  }
  for (const auto& t : a.tamper) apply_tamper(chain, t);

  fs::path chain_path = a.out;
  fs::path reg_path = a.registry.empty() ? default_registry(chain_path) : fs::path(a.registry);
  save_chain(chain_path, chain);
  write_text(reg_path, registry_to_json(registry).dump(2) + "\n");
  out << "issued " << chain.signature_count() << " signatures to " << to_hex(vehicle.public_key())
      << "\n";
  return kExitOk;
}

// ---- verify-chain / vvmt -------------------------------------------------

struct ChainArgs {
  std::string chain;
  std::string registry;
  std::string owner;
  std::size_t threshold = 1;
  std::int64_t window = 600;
  double max_speed = 45.0;
  bool no_gaps = false;
};

VerificationPolicy policy_of(const ChainArgs& a) {
  VerificationPolicy p;
  p.threshold_m = a.threshold;
  p.validity_window_s = a.window;
  p.max_plausible_speed_mps = a.max_speed;
  p.allow_gaps = !a.no_gaps;
  p.validate();
  return p;
}

RsuRegistry registry_of(const ChainArgs& a) {
  fs::path p = a.registry.empty() ? default_registry(a.chain) : fs::path(a.registry);
  return registry_from_json(load_json(p));
}

int cmd_verify(const ChainArgs& a, std::ostream& out) {
  ProofChain chain = load_chain(a.chain);
  RsuRegistry registry = registry_of(a);
  std::optional<PublicKey> owner;
  if (!a.owner.empty()) owner = PublicKey{from_hex(a.owner)};
  auto report = verify_chain(chain, registry, policy_of(a), owner ? &*owner : nullptr);
  std::string counts = std::to_string(report.valid_count) + "/" + std::to_string(report.total_count);
  if (report.accepted) {
    out << "accepted valid=" << counts << "\n";
    return kExitOk;
  }
  out << "rejected index=" << report.first_failure->index
      << " reason=" << to_string(report.first_failure->reason) << " valid=" << counts << "\n";
  return kExitDomain;
}

struct VvmtArgs {
  ChainArgs chain;
  std::string form = "vanilla_linear";
  std::string metric = "euclidean";
  VvmtParams params;
};

int cmd_vvmt(VvmtArgs a, std::ostream& out) {
  ProofChain chain = load_chain(a.chain.chain);
  RsuRegistry registry = registry_of(a.chain);
  a.params.form = vvmt_form_from_string(a.form);
  a.params.validate();
  DistanceMetric metric{distance_kind_from_string(a.metric)};
  auto report = verify_chain(chain, registry, policy_of(a.chain));
  Reputation rep = reputation_of(chain, report, a.params, metric, registry);
  out << "form,metric,score,signatures,valid_count,total_distance_miles\n";
  out << to_string(a.params.form) << ',' << to_string(metric.kind) << ','
      << sim::format_double(rep.score) << ',' << rep.chain_length << ',' << report.valid_count << ','
      << sim::format_double(rep.total_distance) << "\n";
  return kExitOk;
}

// ---- replay-votes ----------------------------------------------------------

int cmd_replay(const std::string& path, std::ostream& out) {
  VoteLog log = parse_vote_log(slurp(path));
  ReplayResult r = replay_vote_log(log);
  out << "records=" << log.records.size() << " decisions=" << r.decisions
      << " mismatches=" << r.mismatches;
  if (r.first_mismatch) out << " first_mismatch=" << *r.first_mismatch;
  out << "\n";
  return r.mismatches == 0 ? kExitOk : kExitDomain;
}

// ---- game / optin ----------------------------------------------------------

void check_keys(const json& doc, const std::set<std::string>& allowed, const std::string& what) {
  if (!doc.is_object()) throw Error(ErrorCode::kConfigError, what + ": expected a JSON object");
  for (const auto& [k, v] : doc.items()) {
    if (!allowed.contains(k)) throw Error(ErrorCode::kConfigError, "field '" + k + "': unknown field");
  }
}

double num_field(const json& doc, const std::string& key, double fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  if (!it->is_number()) throw Error(ErrorCode::kConfigError, "field '" + key + "': expected a number");
  return it->get<double>();
}

GameConfig game_from_json(const json& doc) {
  check_keys(doc, {"reward", "punishment", "vote_cost", "integrity_costs", "n_thld", "majority"},
             "game config");
  GameConfig g;
  g.reward = num_field(doc, "reward", g.reward);
  g.punishment = num_field(doc, "punishment", g.punishment);
  g.vote_cost = num_field(doc, "vote_cost", g.vote_cost);
  auto n = num_field(doc, "n_thld", static_cast<double>(g.n_thld));
  if (n < 0 || n != std::floor(n)) throw Error(ErrorCode::kConfigError, "field 'n_thld': expected a count");
  g.n_thld = static_cast<std::size_t>(n);
  auto it = doc.find("integrity_costs");
  if (it == doc.end() || !it->is_array()) {
    throw Error(ErrorCode::kConfigError, "field 'integrity_costs': expected an array of numbers");
  }
  for (const auto& v : *it) {
    if (!v.is_number()) throw Error(ErrorCode::kConfigError, "field 'integrity_costs': expected numbers");
    g.integrity_costs.push_back(v.get<double>());
  }
  if (auto m = doc.find("majority"); m != doc.end()) {
    std::string s = m->is_string() ? m->get<std::string>() : "";
    if (s == "strict") g.majority = MajorityComparator::kStrictTwoThirds;
    else if (s == "inclusive") g.majority = MajorityComparator::kInclusiveTwoThirds;
    else throw Error(ErrorCode::kConfigError, "field 'majority': expected \"strict\" or \"inclusive\"");
  }
  g.validate();
  return g;
}

std::string profile_string(const StrategyProfile& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(static_cast<int>(p[i]));
  }
  return s;
}

int cmd_game(const std::string& path, bool enumerate, std::ostream& out) {
  GameConfig g = game_from_json(load_json(path));
  StrategyProfile ac = all_cheat_profile(g);
  out << "voter,integrity_cost,sid,all_cheat_action,payoff_truth,payoff_abstain,payoff_cheat\n";
  for (std::size_t i = 0; i < g.voters(); ++i) {
    StrategyProfile p = ac;
    out << i << ',' << sim::format_double(g.integrity_costs[i]) << ','
        << (is_sid(g.integrity_costs[i], g) ? 1 : 0) << ',' << static_cast<int>(ac[i]);
    for (Action a : {Action::kTruth, Action::kAbstain, Action::kCheat}) {
      p[i] = a;
      out << ',' << sim::format_double(payoff(i, p, g));
    }
    out << "\n";
  }
  AllCheatVerdict v = all_cheat_is_pure_ne(g);
  out << "\nverdict,value\n";
  out << "voters," << g.voters() << "\n";
  out << "sids," << count_sids(g) << "\n";
  out << "n_thld," << g.n_thld << "\n";
  out << "all_cheat_ne," << v.is_ne << "\n";
  out << "closed_form_ne," << v.closed_form_ne << "\n";
  out << "deviation_check_ne," << v.deviation_check_ne << "\n";
  if (v.witness) {
    out << "witness_voter," << v.witness->voter << "\n";
    out << "witness_action," << static_cast<int>(v.witness->better_action) << "\n";
    out << "witness_gain," << sim::format_double(v.witness->gain) << "\n";
  }
  if (enumerate) {
    auto all = enumerate_pure_ne(g);
    out << "\nne_index,profile\n";
    for (std::size_t i = 0; i < all.size(); ++i) out << i << ',' << profile_string(all[i]) << "\n";
  }
  return kExitOk;
}

OptInModel optin_from_json(const json& doc) {
  check_keys(doc, {"r_norm", "r_adv", "c_norm_per_vvmt", "c_adv_per_vvmt", "big_m", "vvmt_thld"},
             "opt-in config");
  OptInModel m;
  m.r_norm = num_field(doc, "r_norm", m.r_norm);
  m.r_adv = num_field(doc, "r_adv", m.r_adv);
  m.c_norm_per_vvmt = num_field(doc, "c_norm_per_vvmt", m.c_norm_per_vvmt);
  m.c_adv_per_vvmt = num_field(doc, "c_adv_per_vvmt", m.c_adv_per_vvmt);
  m.big_m = num_field(doc, "big_m", m.big_m);
  m.vvmt_thld = num_field(doc, "vvmt_thld", m.vvmt_thld);
  m.validate();
  return m;
}

int cmd_optin(const std::string& config, const std::string& sweep, std::ostream& out) {
  OptInModel m = config.empty() ? OptInModel{} : optin_from_json(load_json(config));
  double lo = 0.0, hi = m.big_m, step = m.big_m / 10.0;
  if (!sweep.empty()) {
    std::vector<double> parts;
    std::stringstream ss(sweep);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(sim::parse_double(item));
    if (parts.size() != 3) throw Error(ErrorCode::kInvalidArgument, "--sweep-thld expects lo:hi:step");
    lo = parts[0], hi = parts[1], step = parts[2];
  }
  if (!(step > 0.0) || hi < lo) throw Error(ErrorCode::kInvalidArgument, "--sweep-thld needs lo <= hi, step > 0");
  try {
    CriticalThreshold ct = critical_threshold(m);
    out << "# critical_threshold=" << sim::format_double(ct.value) << " regime=" << to_string(ct.regime)
        << "\n";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInfeasible) throw;
    out << "# critical_threshold=none\n";
  }
  out << "vvmt_thld,normal,adversary\n";
  auto steps = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) {
    OptInModel at = m;
    at.vvmt_thld = lo + static_cast<double>(i) * step;
    out << sim::format_double(at.vvmt_thld) << ',' << sim::format_double(expected_payoff(at, Role::kNormal))
        << ',' << sim::format_double(expected_payoff(at, Role::kAdversary)) << "\n";
  }
  return kExitOk;
}

// ---- simulate / sweep / attack ---------------------------------------------

json sim_doc(const std::string& config_path, const std::optional<std::uint64_t>& seed) {
  json doc = config_path.empty() ? json::object() : load_json(config_path);
  if (seed) doc["seed"] = *seed;
  return doc;
}

std::string metrics_csv(const std::vector<sim::SimMetrics>& rows) {
  std::string s = sim::join_csv(sim::metrics_columns()) + "\n";
  for (const auto& m : rows) s += sim::join_csv(sim::metrics_values(m)) + "\n";
  return s;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  return s;
}

std::string command_line(const std::vector<std::string>& args) {
  std::string s = "pot";
  for (const auto& a : args) s += " " + a;
  return s;
}

int cmd_simulate(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out_dir,
                 bool plots, bool no_trace, const std::vector<std::string>& args, std::ostream& out) {
  RunManifest manifest;
  manifest.started_at = wall_time_utc();
  manifest.command = command_line(args);
  sim::SimConfig c = sim::config_from_json(sim_doc(config, seed));
  manifest.config = sim::config_to_json(c);
  manifest.seed = c.seed;

  sim::RunResult r = sim::run(c, {!no_trace});
  std::vector<std::pair<std::string, std::string>> files{{"metrics.csv", metrics_csv({r.metrics})}};
  if (!no_trace) {
    files.emplace_back("traces/run.jsonl", join_lines(r.trace));
    files.emplace_back("traces/votes.csv", format_vote_log(r.vote_log));
  }
  if (plots) {
    // decision delay against session open time, from the trace
    std::map<std::size_t, double> opened;
    std::map<std::size_t, std::size_t> session_event;
    std::map<std::size_t, double> event_time;
    Series s{"decided sessions", {}};
    for (const auto& line : r.trace) {
      json j = json::parse(line);
      if (j["kind"] == "event") event_time[j["event"]] = j["t"];
      if (j["kind"] == "session") opened[j["session"]] = event_time[j["event"]];
      if (j["kind"] == "decision") s.points.emplace_back(opened[j["session"]], j["delay_s"]);
    }
    files.emplace_back("plots/confirmation_delay.svg",
                       line_chart("Confirmation delay per session", "event time (s)",
                                  "delay (s)", {s}));
  }
  write_output_dir(out_dir, files, manifest);
  const auto& m = r.metrics;
  out << "sessions=" << m.sessions_opened << " confirmed_true=" << m.confirmed_true
      << " missed_true=" << m.missed_true << " confirmed_false=" << m.confirmed_false
      << " rejected_false=" << m.rejected_false
      << " invalid_proportion=" << sim::format_double(m.invalid_proportion)
      << " mean_confirmation_delay=" << sim::format_double(m.mean_confirmation_delay) << "\n";
  return kExitOk;
}

std::vector<std::pair<std::string, std::string>> sweep_plots(
    const std::vector<sim::SweepAxis>& axes, const std::vector<sim::SweepRow>& rows) {
  std::vector<std::pair<std::string, std::string>> files;
  if (axes.empty()) return files;
  // x: first axis (index when not numeric); one series per combination of the rest
  auto x_of = [&](const sim::SweepRow& r) {
    const json& v = r.values[0];
    if (v.is_number()) return v.get<double>();
    const auto& vals = axes[0].values;
    return static_cast<double>(std::find(vals.begin(), vals.end(), v) - vals.begin());
  };
  auto label_of = [&](const sim::SweepRow& r) {
    std::string s;
    for (std::size_t a = 1; a < axes.size(); ++a) {
      if (!s.empty()) s += ", ";
      s += axes[a].path + "=" + (r.values[a].is_string() ? r.values[a].get<std::string>() : r.values[a].dump());
    }
    return s.empty() ? std::string("mean") : s;
  };
  for (const std::string metric : {"invalid_proportion", "mean_confirmation_delay"}) {
    std::vector<std::string> order;
    std::map<std::string, std::map<double, std::pair<double, std::size_t>>> acc;
    for (const auto& r : rows) {
      std::string label = label_of(r);
      if (!acc.contains(label)) order.push_back(label);
      double y = metric == "invalid_proportion" ? r.metrics.invalid_proportion
                                                : r.metrics.mean_confirmation_delay;
      auto& cell = acc[label][x_of(r)];
      cell.first += y;
      ++cell.second;
    }
    std::vector<Series> series;
    for (const auto& label : order) {
      Series s{label, {}};
      for (const auto& [x, cell] : acc[label]) s.points.emplace_back(x, cell.first / cell.second);
      series.push_back(std::move(s));
    }
    files.emplace_back("plots/" + metric + ".svg",
                       line_chart(metric + " (mean over replications)", axes[0].path, metric, series));
  }
  return files;
}

struct SweepArgs {
  std::string config, grid, out;
  std::optional<std::uint64_t> seed;
  std::size_t reps = 1;
  std::size_t threads = 0;
  bool plots = false;
  bool traces = false;
};

int cmd_sweep(const SweepArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  RunManifest manifest;
  manifest.started_at = wall_time_utc();
  manifest.command = command_line(args);
  json base = sim_doc(a.config, a.seed);
  sim::SimConfig resolved = sim::config_from_json(base);
  std::vector<sim::SweepAxis> axes = a.grid.empty() ? std::vector<sim::SweepAxis>{}
                                                    : sim::grid_from_json(load_json(a.grid));
  if (a.reps == 0) throw Error(ErrorCode::kInvalidArgument, "--reps must be >= 1");
  auto rows = sim::sweep(base, axes, {a.reps, a.threads, a.traces && !a.out.empty()});
  std::string csv = sim::format_sweep_csv(axes, rows);
  if (a.out.empty()) {
    out << csv;
    return kExitOk;
  }
  manifest.config = sim::config_to_json(resolved);
  manifest.config["sweep_grid"] = a.grid.empty() ? json::object() : load_json(a.grid);
  manifest.config["replications"] = a.reps;
  manifest.seed = resolved.seed;
  std::vector<std::pair<std::string, std::string>> files{{"metrics.csv", csv}};
  if (a.traces) {
    for (const auto& r : rows) {
      files.emplace_back("traces/p" + std::to_string(r.point) + "_r" + std::to_string(r.replication) +
                             ".jsonl",
                         join_lines(r.trace));
    }
  }
  if (a.plots) {
    for (auto& f : sweep_plots(axes, rows)) files.push_back(std::move(f));
  }
  write_output_dir(a.out, files, manifest);
  out << "rows=" << rows.size() << " out=" << a.out << "\n";
  return kExitOk;
}

int cmd_attack(const std::string& kind, const std::string& config, std::optional<std::uint64_t> seed,
               const std::string& out_dir, const std::vector<std::string>& args, std::ostream& out) {
  RunManifest manifest;
  manifest.started_at = wall_time_utc();
  manifest.command = command_line(args);
  sim::SimConfig c = sim::config_from_json(sim_doc(config, seed));
  auto report = sim::attack_scenario(sim::attack_kind_from_string(kind), c);
  std::string csv = sim::format_report_csv(report);
  out << csv;
  if (!out_dir.empty()) {
    manifest.config = sim::config_to_json(c);
    manifest.seed = c.seed;
    write_output_dir(out_dir, {{"report.csv", csv}}, manifest);
  }
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Proof-of-Travel toolkit: location-signature chains, VVMT reputation, voting "
               "games and corridor simulation",
               "pot"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::function<int()> action;

  // keygen
  auto* keygen = app.add_subcommand("keygen", "Derive an Ed25519 key pair from a seed");
  std::uint64_t kg_seed = 0;
  std::string kg_out;
  keygen->add_option("--seed", kg_seed, "Key seed")->required();
  keygen->add_option("--out", kg_out, "Write the key pair JSON here instead of stdout");
  keygen->callback([&] { action = [&] { return cmd_keygen(kg_seed, kg_out, out); }; });

  // issue
  auto* issue = app.add_subcommand("issue", "Drive a vehicle past a row of RSUs and save its chain");
  IssueArgs ia;
  issue->add_option("--seed", ia.seed, "Seed for vehicle and RSU keys")->required();
  issue->add_option("--length", ia.length, "Number of RSUs passed")->capture_default_str();
  issue->add_option("--spacing-miles", ia.spacing_miles, "RSU spacing")->capture_default_str();
  issue->add_option("--hop-s", ia.hop_s, "Seconds between RSUs")->capture_default_str();
  issue->add_option("--start-time", ia.start_time, "First timestamp")->capture_default_str();
  issue->add_option("--out", ia.out, "Chain file (.potc binary, .json for JSON)")->required();
  issue->add_option("--registry", ia.registry, "Registry JSON (default: <out>.registry.json)");
  issue->add_option("--gap", ia.gaps, "Entry index to leave as a gap (repeatable)");
  issue->add_option("--tamper", ia.tamper, "INDEX:FIELD to corrupt after issuance (repeatable)");
  issue->callback([&] { action = [&] { return cmd_issue(ia, out); }; });

  // verify-chain
  auto* verify = app.add_subcommand("verify-chain", "Verify a proof chain against an RSU registry");
  ChainArgs ca;
  auto add_chain_opts = [](CLI::App* sub, ChainArgs& a) {
    sub->add_option("chain", a.chain, "Chain file (POTC or JSON)")->required();
    sub->add_option("--registry", a.registry, "Registry JSON (default: <chain>.registry.json)");
    sub->add_option("--threshold", a.threshold, "Minimum valid signatures m")->capture_default_str();
    sub->add_option("--window", a.window, "Validity window, seconds")->capture_default_str();
    sub->add_option("--max-speed", a.max_speed, "Plausible speed bound, m/s")->capture_default_str();
    sub->add_flag("--no-gaps", a.no_gaps, "Reject chains with gap entries");
  };
  add_chain_opts(verify, ca);
  verify->add_option("--owner", ca.owner, "Expected vehicle public key (hex)");
  verify->callback([&] { action = [&] { return cmd_verify(ca, out); }; });

  // vvmt
  auto* vvmt = app.add_subcommand("vvmt", "Compute the reputation of a verified chain");
  VvmtArgs va;
  add_chain_opts(vvmt, va.chain);
  vvmt->add_option("--form", va.form,
                   "vanilla_linear | vanilla_logistic | resilient_linear | resilient_logistic")
      ->capture_default_str();
  vvmt->add_option("--metric", va.metric, "euclidean | path_cumulative")->capture_default_str();
  vvmt->add_option("--gamma", va.params.gamma)->capture_default_str();
  vvmt->add_option("--big-m", va.params.big_m)->capture_default_str();
  vvmt->add_option("--k", va.params.k)->capture_default_str();
  vvmt->add_option("--m-mid", va.params.m_mid)->capture_default_str();
  vvmt->add_option("--alpha", va.params.alpha)->capture_default_str();
  vvmt->add_option("--n-max", va.params.n_max)->capture_default_str();
  vvmt->callback([&] { action = [&] { return cmd_vvmt(va, out); }; });

  // replay-votes
  auto* replay = app.add_subcommand("replay-votes", "Re-run the decision rule over a vote log");
  std::string log_path;
  replay->add_option("log", log_path, "Vote log CSV")->required();
  replay->callback([&] { action = [&] { return cmd_replay(log_path, out); }; });

  // game
  auto* game = app.add_subcommand("game", "Nash-equilibrium analysis of the voting game");
  std::string game_cfg;
  bool enumerate = false;
  game->add_option("--config", game_cfg, "Game JSON: reward, punishment, vote_cost, "
                                         "integrity_costs, n_thld, majority")
      ->required();
  game->add_flag("--enumerate", enumerate, "List every pure-strategy equilibrium");
  game->callback([&] { action = [&] { return cmd_game(game_cfg, enumerate, out); }; });

  // optin
  auto* optin = app.add_subcommand("optin", "Expected payoffs of normal and adversarial participants");
  std::string optin_cfg, optin_sweep;
  optin->add_option("--config", optin_cfg, "Model JSON: r_norm, r_adv, c_norm_per_vvmt, "
                                           "c_adv_per_vvmt, big_m");
  optin->add_option("--sweep-thld", optin_sweep, "lo:hi:step (default 0:M:M/10)");
  optin->callback([&] { action = [&] { return cmd_optin(optin_cfg, optin_sweep, out); }; });

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run one corridor simulation");
  std::string sim_cfg, sim_out;
  std::optional<std::uint64_t> sim_seed;
  bool sim_plots = false, sim_no_trace = false;
  simulate->add_option("--config", sim_cfg, "Simulation config JSON (see docs/sim_config.schema.json)");
  simulate->add_option("--seed", sim_seed, "Overrides the config seed");
  simulate->add_option("--out", sim_out, "Output directory")->required();
  simulate->add_flag("--plots", sim_plots, "Also write SVG charts");
  simulate->add_flag("--no-trace", sim_no_trace, "Skip the per-run trace files");
  simulate->callback([&] {
    action = [&] { return cmd_simulate(sim_cfg, sim_seed, sim_out, sim_plots, sim_no_trace, args, out); };
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a parameter grid with replications");
  SweepArgs sa;
  sweep->add_option("--config", sa.config, "Base simulation config JSON");
  sweep->add_option("--grid", sa.grid, "Grid JSON: {\"dotted.field\": [values...]}");
  sweep->add_option("--reps", sa.reps, "Replications per grid point")->capture_default_str();
  sweep->add_option("--seed", sa.seed, "Base seed; replication r uses seed + r");
  sweep->add_option("--threads", sa.threads, "Worker threads (default: POT_THREADS or all cores)");
  sweep->add_option("--out", sa.out, "Output directory (default: CSV on stdout)");
  sweep->add_flag("--plots", sa.plots, "Also write SVG charts");
  sweep->add_flag("--traces", sa.traces, "Write one trace per run");
  sweep->callback([&] { action = [&] { return cmd_sweep(sa, args, out); }; });

  // attack
  auto* attack = app.add_subcommand("attack", "Run an attack scenario");
  std::string kind, atk_cfg, atk_out;
  std::optional<std::uint64_t> atk_seed;
  attack->add_option("--kind", kind, "replay | forgery | key_swap_collusion | sybil_flood")
      ->required()
      ->check(CLI::IsMember({"replay", "forgery", "key_swap_collusion", "sybil_flood"}));
  attack->add_option("--config", atk_cfg, "Simulation config JSON (attack section)");
  attack->add_option("--seed", atk_seed, "Overrides the config seed");
  attack->add_option("--out", atk_out, "Output directory");
  attack->callback([&] {
    action = [&] { return cmd_attack(kind, atk_cfg, atk_seed, atk_out, args, out); };
  });

  std::vector<std::string> argv_store{"pot"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;  // --help, --version
    for (auto* sub : app.get_subcommands()) err << sub->help();
    if (app.get_subcommands().empty()) err << app.help();
    return kExitUsage;
  }
  try {
    return action();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    bool sim_command = app.got_subcommand("simulate") || app.got_subcommand("sweep") ||
                       app.got_subcommand("attack");
    if (e.code() == ErrorCode::kConfigError && sim_command) {
      err << "see docs/sim_config.schema.json for the config layout\n";
    }
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}

}  // namespace pot::cli
