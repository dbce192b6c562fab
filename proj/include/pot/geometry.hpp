#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace pot {

inline constexpr double kMetersPerMile = 1609.344;
inline constexpr double kMetersPerSecondPerMph = kMetersPerMile / 3600.0;

/// Planar corridor coordinates, stored as integer millimeters so that the
/// canonical encoding is exact.
struct Position {
  std::int64_t x_mm = 0;
  std::int64_t y_mm = 0;

  static Position from_meters(double x, double y = 0.0) {
    return {static_cast<std::int64_t>(std::llround(x * 1000.0)),
            static_cast<std::int64_t>(std::llround(y * 1000.0))};
  }
  static Position from_miles(double x, double y = 0.0) {
    return from_meters(x * kMetersPerMile, y * kMetersPerMile);
  }

  double x_m() const noexcept { return static_cast<double>(x_mm) / 1000.0; }
  double y_m() const noexcept { return static_cast<double>(y_mm) / 1000.0; }

  auto operator<=>(const Position&) const = default;
};

inline double distance_m(const Position& a, const Position& b) {
  return std::hypot(a.x_m() - b.x_m(), a.y_m() - b.y_m());
}

inline double meters_to_miles(double m) { return m / kMetersPerMile; }
inline double miles_to_meters(double mi) { return mi * kMetersPerMile; }

}  // namespace pot
