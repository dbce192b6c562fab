#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "pot/sim/metrics.hpp"
#include "pot/sim/simulator.hpp"

namespace pot::sim {

struct SweepAxis {
  std::string path;  // dotted config field, e.g. "voting.n_thld"
  std::vector<nlohmann::json> values;
};

/// A JSON object mapping dotted field paths to arrays of values. Axes are
/// taken in key order; the first axis varies slowest.
std::vector<SweepAxis> grid_from_json(const nlohmann::json& doc);

struct SweepRow {
  std::size_t point = 0;
  std::vector<nlohmann::json> values;  // one per axis
  std::size_t replication = 0;
  SimMetrics metrics;
  std::vector<std::string> trace;  // when requested
};

struct SweepOptions {
  std::size_t replications = 1;
  /// 0 picks POT_THREADS, else the hardware concurrency.
  std::size_t threads = 0;
  bool trace = false;
};

/// Worker count from POT_THREADS (when set and positive) capped by `jobs`.
std::size_t thread_count(std::size_t requested, std::size_t jobs);

/// One row per (grid point, replication), ordered by point then replication.
/// Replication r runs with seed base.seed + r. Every config is validated
/// before any run starts; a bad point throws ConfigError.
std::vector<SweepRow> sweep(const nlohmann::json& base, const std::vector<SweepAxis>& axes,
                            const SweepOptions& options);

std::string format_sweep_csv(const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows);

/// Parses a CSV written by format_sweep_csv (or a single-run metrics CSV).
std::vector<SimMetrics> parse_metrics_csv(const std::string& text);

}  // namespace pot::sim
