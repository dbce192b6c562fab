#include "pot/sim/sweep.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "pot/error.hpp"

namespace pot::sim {

std::vector<SweepAxis> grid_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kConfigError, "grid must be a JSON object");
  std::vector<SweepAxis> axes;
  for (const auto& [key, values] : doc.items()) {
    if (!values.is_array() || values.empty()) {
      throw Error(ErrorCode::kConfigError, "field '" + key + "': grid values must be a non-empty array");
    }
    axes.push_back({key, std::vector<nlohmann::json>(values.begin(), values.end())});
  }
  return axes;
}

std::size_t thread_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested;
  if (n == 0) {
    n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("POT_THREADS")) {
      long v = std::strtol(env, nullptr, 10);
      if (v > 0) n = static_cast<std::size_t>(v);
    }
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

std::vector<SweepRow> sweep(const nlohmann::json& base, const std::vector<SweepAxis>& axes,
                            const SweepOptions& options) {
  std::size_t points = 1;
  for (const auto& a : axes) points *= a.values.size();

  // resolve every config up front so a bad grid fails before any work
  std::vector<SweepRow> rows;
  std::vector<SimConfig> configs;
  for (std::size_t p = 0; p < points; ++p) {
    nlohmann::json doc = base;
    std::vector<nlohmann::json> values;
    std::size_t rest = p;
    std::vector<std::size_t> idx(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      idx[a] = rest % axes[a].values.size();
      rest /= axes[a].values.size();
    }
    for (std::size_t a = 0; a < axes.size(); ++a) {
      set_config_field(doc, axes[a].path, axes[a].values[idx[a]]);
      values.push_back(axes[a].values[idx[a]]);
    }
    SimConfig point = config_from_json(doc);
    for (std::size_t r = 0; r < options.replications; ++r) {
      SimConfig c = point;
      c.seed = point.seed + r;
      configs.push_back(c);
      rows.push_back({p, values, r, {}, {}});
    }
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      try {
        RunResult res = run(configs[i], RunOptions{options.trace});
        rows[i].metrics = res.metrics;
        rows[i].trace = std::move(res.trace);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::size_t n = thread_count(options.threads, rows.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string format_sweep_csv(const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows) {
  std::vector<std::string> header;
  for (const auto& a : axes) header.push_back(a.path);
  header.push_back("replication");
  for (auto& c : metrics_columns()) header.push_back(c);
  std::string out = join_csv(header) + "\n";
  for (const auto& row : rows) {
    std::vector<std::string> fields;
    for (const auto& v : row.values) fields.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    fields.push_back(std::to_string(row.replication));
    for (auto& v : metrics_values(row.metrics)) fields.push_back(std::move(v));
    out += join_csv(fields) + "\n";
  }
  return out;
}

std::vector<SimMetrics> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  std::vector<SimMetrics> out;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (header.empty()) {
      header = std::move(fields);
      continue;
    }
    try {
      out.push_back(metrics_from_values(header, fields));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace pot::sim
