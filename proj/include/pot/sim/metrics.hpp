#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pot/voting.hpp"

namespace pot::sim {

inline constexpr std::array<RejectReason, 10> kRejectReasons = {
    RejectReason::kSessionClosed,  RejectReason::kUnknownEventType, RejectReason::kEventMismatch,
    RejectReason::kInvalidValue,   RejectReason::kBadSignature,     RejectReason::kOutOfRange,
    RejectReason::kDuplicateVoter, RejectReason::kMissingProof,     RejectReason::kInvalidProof,
    RejectReason::kInsufficientVvmt,
};

/// Share of SIDs among vehicles whose prior VVMT reaches a threshold.
struct EligibilityPoint {
  double threshold = 0.0;
  std::size_t eligible = 0;
  std::size_t sids = 0;
  double p_sid = 0.0;

  bool operator==(const EligibilityPoint&) const = default;
};

struct SimMetrics {
  std::uint64_t seed = 0;
  std::size_t vehicles = 0;
  std::size_t malicious_vehicles = 0;
  std::size_t true_events = 0;
  std::size_t false_events = 0;
  std::size_t false_events_skipped = 0;  // no malicious vehicle near an RSU
  std::size_t sessions_opened = 0;

  std::size_t confirmed_true = 0;
  /// Includes true-event sessions still undecided at the horizon.
  std::size_t missed_true = 0;
  std::size_t undecided_true = 0;
  std::size_t confirmed_false = 0;
  std::size_t rejected_false = 0;
  std::size_t undecided_false = 0;
  /// confirmed_true + missed_true + confirmed_false + rejected_false
  std::size_t decisions_total = 0;
  /// (confirmed_false + missed_true) / decisions_total
  double invalid_proportion = 0.0;

  std::size_t decided_sessions = 0;
  double mean_confirmation_delay = 0.0;  // seconds, over decided sessions
  double throughput = 0.0;               // confirmed true events per minute

  std::size_t votes_submitted = 0;
  std::size_t votes_accepted = 0;
  std::size_t votes_dropped = 0;
  std::size_t abstentions = 0;
  std::array<std::size_t, kRejectReasons.size()> rejections{};

  double vvmt_thld = 0.0;
  double p_sid_population = 0.0;
  double p_sid_eligible = 0.0;
  std::size_t eligible_population = 0;
  bool p_sid_monotone = true;
  std::vector<EligibilityPoint> eligibility;

  std::size_t rejections_for(RejectReason r) const;
  bool operator==(const SimMetrics&) const = default;
};

/// Column names in output order.
std::vector<std::string> metrics_columns();
std::vector<std::string> metrics_values(const SimMetrics& m);
/// Inverse of metrics_values. Throws ParseError.
SimMetrics metrics_from_values(const std::vector<std::string>& columns,
                               const std::vector<std::string>& values);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

std::vector<std::string> split_csv_line(const std::string& line);
std::string join_csv(const std::vector<std::string>& fields);

}  // namespace pot::sim
