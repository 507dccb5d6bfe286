#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace tnsim {

/// Integer seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

inline constexpr Timestamp kSecondsPerMinute = 60;
inline constexpr Timestamp kSecondsPerHour = 3600;
inline constexpr Timestamp kSecondsPerDay = 86400;
inline constexpr Timestamp kSecondsPerWeek = 7 * kSecondsPerDay;

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  const std::int64_t q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

constexpr std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

constexpr std::int64_t day_index(Timestamp t) { return floor_div(t, kSecondsPerDay); }
constexpr std::int64_t hour_index(Timestamp t) { return floor_div(t, kSecondsPerHour); }
constexpr Timestamp day_start(Timestamp t) { return day_index(t) * kSecondsPerDay; }

/// 0 = Monday ... 6 = Sunday. The epoch fell on a Thursday.
constexpr int weekday(Timestamp t) {
  return static_cast<int>(floor_mod(day_index(t) + 3, 7));
}

constexpr int hour_of_day(Timestamp t) {
  return static_cast<int>(hour_index(t) - day_index(t) * 24);
}

constexpr bool is_weekend(Timestamp t) { return weekday(t) >= 5; }

/// Hour-of-week bin, 0 = Monday 00:00.
constexpr int hour_of_week(Timestamp t) { return weekday(t) * 24 + hour_of_day(t); }

/// Start of the Monday-based week containing t.
constexpr Timestamp week_start(Timestamp t) {
  return day_start(t) - static_cast<Timestamp>(weekday(t)) * kSecondsPerDay;
}

/// Accepts an integer epoch, "YYYY-MM-DD", "YYYY-MM-DD HH:MM[:SS]" or the
/// same with a 'T' separator and an optional trailing 'Z'. Throws
/// std::invalid_argument on anything else.
Timestamp parse_time(std::string_view text);

/// "YYYY-MM-DD HH:MM:SS" in UTC.
std::string format_time(Timestamp t);

}  // namespace tnsim
