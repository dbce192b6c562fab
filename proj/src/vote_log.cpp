#include "pot/vote_log.hpp"

#include <charconv>
#include <map>
#include <sstream>

#include "pot/error.hpp"

namespace pot {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

template <typename T>
T parse_int(std::string_view s, std::size_t line_no) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw Error(ErrorCode::kParseError,
                "line " + std::to_string(line_no) + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

constexpr std::string_view kHeader =
    "session,timestamp,voter,event_type,value,accepted,reject_reason,decision";

}  // namespace

VoteLogRecord make_log_record(const VotingSession& session, const Vote& vote,
                              const SessionUpdate& update) {
  VoteLogRecord r;
  r.session = session.event_id();
  r.timestamp = vote.timestamp;
  r.voter = to_hex(vote.voter_public_key);
  r.event_type = vote.event_type;
  r.value = vote.value;
  r.accepted = update.accepted;
  r.reject_reason = update.reject_reason;
  if (update.decision) r.decision = update.decision->value;
  return r;
}

std::string format_vote_log(const VoteLog& log) {
  std::ostringstream out;
  out << "# n_thld=" << log.n_thld << " mode=" << to_string(log.mode) << '\n' << kHeader << '\n';
  for (const auto& r : log.records) {
    out << r.session << ',' << r.timestamp << ',' << r.voter << ',' << to_string(r.event_type)
        << ',' << r.value << ',' << (r.accepted ? 1 : 0) << ','
        << (r.reject_reason ? to_string(*r.reject_reason) : "") << ',';
    if (r.decision) out << *r.decision;
    out << '\n';
  }
  return out.str();
}

VoteLog parse_vote_log(std::string_view text) {
  VoteLog log;
  bool header_seen = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      for (auto tok : split(line.substr(1), ' ')) {
        if (tok.starts_with("n_thld=")) log.n_thld = parse_int<std::size_t>(tok.substr(7), line_no);
        if (tok.starts_with("mode=")) log.mode = voting_mode_from_string(tok.substr(5));
      }
      continue;
    }
    if (!header_seen) {
      if (line != kHeader) {
        throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": bad header");
      }
      header_seen = true;
      continue;
    }
    auto f = split(line, ',');
    if (f.size() != 8) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": expected 8 fields");
    }
    VoteLogRecord r;
    r.session = parse_int<std::uint64_t>(f[0], line_no);
    r.timestamp = parse_int<std::int64_t>(f[1], line_no);
    r.voter = std::string(f[2]);
    r.event_type = event_type_from_string(f[3]);
    r.value = parse_int<int>(f[4], line_no);
    r.accepted = parse_int<int>(f[5], line_no) != 0;
    if (!f[6].empty()) r.reject_reason = reject_reason_from_string(f[6]);
    if (!f[7].empty()) r.decision = parse_int<int>(f[7], line_no);
    log.records.push_back(std::move(r));
  }
  if (!header_seen) throw Error(ErrorCode::kParseError, "missing vote log header");
  return log;
}

ReplayResult replay_vote_log(const VoteLog& log) {
  struct Tally {
    std::size_t positive = 0;
    std::size_t n = 0;
  };
  std::map<std::uint64_t, Tally> tallies;
  ReplayResult result;
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto& r = log.records[i];
    std::optional<int> expected;
    if (r.accepted) {
      Tally& t = tallies[r.session];
      ++t.n;
      if (r.value == 1) ++t.positive;
      if (auto d = decide(t.positive, t.n, log.n_thld)) {
        expected = d->value;
        t = Tally{};
      }
    }
    if (expected) ++result.decisions;
    if (expected != r.decision) {
      ++result.mismatches;
      if (!result.first_mismatch) result.first_mismatch = i;
    }
  }
  return result;
}

}  // namespace pot
