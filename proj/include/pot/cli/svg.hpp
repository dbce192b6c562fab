#pragma once

#include <string>
#include <utility>
#include <vector>

namespace pot::cli {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

/// Self-contained SVG line chart with axes, ticks and a legend.
std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series);

}  // namespace pot::cli
