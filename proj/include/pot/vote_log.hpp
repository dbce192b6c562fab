#pragma once

// Line-oriented vote log. One header comment line carrying the quorum and
// mode, a CSV header, then one row per submitted vote:
//   session,timestamp,voter,event_type,value,accepted,reject_reason,decision
// `decision` is 1 or -1 on the row that triggered it and empty otherwise.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pot/voting.hpp"

namespace pot {

struct VoteLogRecord {
  std::uint64_t session = 0;
  std::int64_t timestamp = 0;
  std::string voter;  // lowercase hex public key
  EventType event_type = EventType::kIncident;
  int value = 1;
  bool accepted = false;
  std::optional<RejectReason> reject_reason;
  std::optional<int> decision;

  bool operator==(const VoteLogRecord&) const = default;
};

VoteLogRecord make_log_record(const VotingSession& session, const Vote& vote,
                              const SessionUpdate& update);

struct VoteLog {
  std::size_t n_thld = 5;
  VotingMode mode = VotingMode::kCpv;
  std::vector<VoteLogRecord> records;

  bool operator==(const VoteLog&) const = default;
};

std::string format_vote_log(const VoteLog& log);
/// Throws ParseError with the offending line number.
VoteLog parse_vote_log(std::string_view text);

struct ReplayResult {
  std::size_t decisions = 0;
  std::size_t mismatches = 0;
  /// 0-based record index of the first disagreement.
  std::optional<std::size_t> first_mismatch;
};

/// Re-runs the decision rule over the accepted votes of every session (the
/// tally restarts after each decision) and compares with the logged decisions.
ReplayResult replay_vote_log(const VoteLog& log);

}  // namespace pot
