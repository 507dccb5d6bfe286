#include "tnsim/time.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace tnsim {
namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

[[noreturn]] void bad_time(std::string_view text) {
  throw std::invalid_argument("unrecognized timestamp: '" + std::string(text) + "'");
}

}  // namespace

Timestamp parse_time(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) bad_time(text);

  {
    std::int64_t epoch = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), epoch);
    if (ec == std::errc{} && ptr == text.data() + text.size()) return epoch;
  }

  std::string_view s = text;
  if (s.back() == 'Z') s.remove_suffix(1);
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') bad_time(text);
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), mo) ||
      !parse_int(s.substr(8, 2), d)) {
    bad_time(text);
  }
  if (s.size() > 10) {
    if (s[10] != 'T' && s[10] != ' ') bad_time(text);
    std::string_view clock = s.substr(11);
    if (clock.size() != 5 && clock.size() != 8) bad_time(text);
    if (clock[2] != ':' || !parse_int(clock.substr(0, 2), h) ||
        !parse_int(clock.substr(3, 2), mi)) {
      bad_time(text);
    }
    if (clock.size() == 8 && (clock[5] != ':' || !parse_int(clock.substr(6, 2), sec))) {
      bad_time(text);
    }
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 59) bad_time(text);
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days) * kSecondsPerDay + h * kSecondsPerHour +
         mi * kSecondsPerMinute + sec;
}

std::string format_time(Timestamp t) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{day_index(t)}}};
  const Timestamp in_day = t - day_start(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(in_day / 3600), static_cast<int>(in_day % 3600 / 60),
                static_cast<int>(in_day % 60));
  return buf;
}

}  // namespace tnsim
