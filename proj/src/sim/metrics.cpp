#include "pot/sim/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>

#include "pot/error.hpp"

namespace pot::sim {

std::size_t SimMetrics::rejections_for(RejectReason r) const {
  auto it = std::find(kRejectReasons.begin(), kRejectReasons.end(), r);
  return rejections[static_cast<std::size_t>(it - kRejectReasons.begin())];
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double parse_double(const std::string& s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw Error(ErrorCode::kParseError, "bad number '" + s + "'");
  }
  return v;
}

namespace {

std::size_t parse_size(const std::string& s) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw Error(ErrorCode::kParseError, "bad count '" + s + "'");
  }
  return v;
}

std::string format_eligibility(const std::vector<EligibilityPoint>& pts) {
  std::string out;
  for (const auto& e : pts) {
    if (!out.empty()) out += ';';
    out += format_double(e.threshold) + ':' + std::to_string(e.eligible) + ':' +
           std::to_string(e.sids) + ':' + format_double(e.p_sid);
  }
  return out;
}

std::vector<EligibilityPoint> parse_eligibility(const std::string& s) {
  std::vector<EligibilityPoint> out;
  std::size_t start = 0;
  while (start < s.size()) {
    std::size_t end = s.find(';', start);
    if (end == std::string::npos) end = s.size();
    std::string item = s.substr(start, end - start);
    std::vector<std::string> parts;
    std::size_t a = 0;
    while (true) {
      std::size_t b = item.find(':', a);
      parts.push_back(item.substr(a, b == std::string::npos ? std::string::npos : b - a));
      if (b == std::string::npos) break;
      a = b + 1;
    }
    if (parts.size() != 4) throw Error(ErrorCode::kParseError, "bad eligibility item '" + item + "'");
    out.push_back({parse_double(parts[0]), parse_size(parts[1]), parse_size(parts[2]),
                   parse_double(parts[3])});
    start = end + 1;
  }
  return out;
}

// One accessor pair per column keeps formatting and parsing in lockstep.
struct Column {
  std::string name;
  std::function<std::string(const SimMetrics&)> get;
  std::function<void(SimMetrics&, const std::string&)> set;
};

template <typename T>
Column count_col(std::string name, T SimMetrics::*field) {
  return {std::move(name), [field](const SimMetrics& m) { return std::to_string(m.*field); },
          [field](SimMetrics& m, const std::string& s) { m.*field = static_cast<T>(parse_size(s)); }};
}

Column real_col(std::string name, double SimMetrics::*field) {
  return {std::move(name), [field](const SimMetrics& m) { return format_double(m.*field); },
          [field](SimMetrics& m, const std::string& s) { m.*field = parse_double(s); }};
}

const std::vector<Column>& columns() {
  static const std::vector<Column> cols = [] {
    std::vector<Column> c{
        count_col("seed", &SimMetrics::seed),
        count_col("vehicles", &SimMetrics::vehicles),
        count_col("malicious_vehicles", &SimMetrics::malicious_vehicles),
        count_col("true_events", &SimMetrics::true_events),
        count_col("false_events", &SimMetrics::false_events),
        count_col("false_events_skipped", &SimMetrics::false_events_skipped),
        count_col("sessions_opened", &SimMetrics::sessions_opened),
        count_col("confirmed_true", &SimMetrics::confirmed_true),
        count_col("missed_true", &SimMetrics::missed_true),
        count_col("undecided_true", &SimMetrics::undecided_true),
        count_col("confirmed_false", &SimMetrics::confirmed_false),
        count_col("rejected_false", &SimMetrics::rejected_false),
        count_col("undecided_false", &SimMetrics::undecided_false),
        count_col("decisions_total", &SimMetrics::decisions_total),
        real_col("invalid_proportion", &SimMetrics::invalid_proportion),
        count_col("decided_sessions", &SimMetrics::decided_sessions),
        real_col("mean_confirmation_delay", &SimMetrics::mean_confirmation_delay),
        real_col("throughput", &SimMetrics::throughput),
        count_col("votes_submitted", &SimMetrics::votes_submitted),
        count_col("votes_accepted", &SimMetrics::votes_accepted),
        count_col("votes_dropped", &SimMetrics::votes_dropped),
        count_col("abstentions", &SimMetrics::abstentions),
    };
    for (std::size_t i = 0; i < kRejectReasons.size(); ++i) {
      c.push_back({"rejected_" + std::string(to_string(kRejectReasons[i])),
                   [i](const SimMetrics& m) { return std::to_string(m.rejections[i]); },
                   [i](SimMetrics& m, const std::string& s) { m.rejections[i] = parse_size(s); }});
    }
    c.push_back(real_col("vvmt_thld", &SimMetrics::vvmt_thld));
    c.push_back(real_col("p_sid_population", &SimMetrics::p_sid_population));
    c.push_back(real_col("p_sid_eligible", &SimMetrics::p_sid_eligible));
    c.push_back(count_col("eligible_population", &SimMetrics::eligible_population));
    c.push_back({"p_sid_monotone",
                 [](const SimMetrics& m) { return std::string(m.p_sid_monotone ? "1" : "0"); },
                 [](SimMetrics& m, const std::string& s) { m.p_sid_monotone = s == "1"; }});
    c.push_back({"eligibility",
                 [](const SimMetrics& m) { return format_eligibility(m.eligibility); },
                 [](SimMetrics& m, const std::string& s) { m.eligibility = parse_eligibility(s); }});
    return c;
  }();
  return cols;
}

}  // namespace

std::vector<std::string> metrics_columns() {
  std::vector<std::string> out;
  for (const auto& c : columns()) out.push_back(c.name);
  return out;
}

std::vector<std::string> metrics_values(const SimMetrics& m) {
  std::vector<std::string> out;
  for (const auto& c : columns()) out.push_back(c.get(m));
  return out;
}

SimMetrics metrics_from_values(const std::vector<std::string>& names,
                               const std::vector<std::string>& values) {
  if (names.size() != values.size()) {
    throw Error(ErrorCode::kParseError, "column count does not match value count");
  }
  std::map<std::string, const Column*> by_name;
  for (const auto& c : columns()) by_name[c.name] = &c;
  SimMetrics m;
  std::size_t matched = 0;
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto it = by_name.find(names[i]);
    if (it == by_name.end()) continue;  // grid or bookkeeping column
    it->second->set(m, values[i]);
    ++matched;
  }
  if (matched != by_name.size()) throw Error(ErrorCode::kParseError, "missing metrics columns");
  return m;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string join_csv(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n") == std::string::npos) {
      out += f;
    } else {
      out += '"';
      for (char ch : f) {
        if (ch == '"') out += '"';
        out += ch;
      }
      out += '"';
    }
  }
  return out;
}

}  // namespace pot::sim
