#include "tnsim/metrics/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace tnsim::metrics {

std::vector<double> hourly_counts(const EventLog& log, TimeWindow window) {
  if (window.end <= window.start) return {};
  const std::int64_t first = hour_index(window.start);
  const std::int64_t last = hour_index(window.end - 1);
  std::vector<double> counts(static_cast<std::size_t>(last - first + 1), 0.0);
  for (const Event& e : log) {
    if (window.contains(e.timestamp)) counts[static_cast<std::size_t>(hour_index(e.timestamp) - first)] += 1;
  }
  return counts;
}

Scored circadian_autocorrelation(const EventLog& log, TimeWindow window) {
  const auto counts = hourly_counts(log, window);
  const std::int64_t first = hour_index(window.start);
  auto weekday_hour = [first](std::size_t h) {
    return !is_weekend((first + static_cast<std::int64_t>(h)) * kSecondsPerHour);
  };
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t h = 0; h + 24 < counts.size(); ++h) {
    if (weekday_hour(h) && weekday_hour(h + 24)) {
      x.push_back(counts[h]);
      y.push_back(counts[h + 24]);
    }
  }
  if (x.size() < 2) return {0.0, {"too few weekday lag-24 pairs; rho24 set to 0"}};
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx <= 0 || syy <= 0) return {0.0, {"constant hourly series; rho24 set to 0"}};
  return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), {}};
}

Histogram hour_of_day_histogram(const EventLog& log) {
  if (log.empty()) throw MetricError("hour-of-day histogram of an empty log");
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(24);
  for (const Event& e : log) counts(hour_of_day(e.timestamp)) += 1;
  return Histogram::from_counts(counts);
}

std::optional<double> burstiness(std::span<const Timestamp> sorted_times) {
  if (sorted_times.size() < 3) return std::nullopt;
  const double gaps = static_cast<double>(sorted_times.size() - 1);
  double mean = 0;
  for (std::size_t k = 1; k < sorted_times.size(); ++k) {
    mean += static_cast<double>(sorted_times[k] - sorted_times[k - 1]);
  }
  mean /= gaps;
  if (!(mean > 0)) return std::nullopt;
  double var = 0;
  for (std::size_t k = 1; k < sorted_times.size(); ++k) {
    const double d = static_cast<double>(sorted_times[k] - sorted_times[k - 1]) - mean;
    var += d * d;
  }
  const double sigma = std::sqrt(var / gaps);
  return (sigma - mean) / (sigma + mean);
}

std::vector<double> node_burstiness(const EventLog& log) {
  std::map<AgentIndex, std::vector<Timestamp>> by_sender;
  for (const Event& e : log) by_sender[e.sender].push_back(e.timestamp);
  std::vector<double> values;
  for (const auto& [agent, times] : by_sender) {
    if (auto b = burstiness(times)) values.push_back(*b);
  }
  return values;
}

double weekend_weekday_ratio(const EventLog& log, TimeWindow window) {
  double weekend_days = 0, weekday_days = 0;
  for (std::int64_t d = window.first_day(); d <= window.last_day(); ++d) {
    (is_weekend(d * kSecondsPerDay) ? weekend_days : weekday_days) += 1;
  }
  if (weekend_days == 0 || weekday_days == 0) {
    throw MetricError("window lacks weekend or weekday days");
  }
  double weekend = 0, weekday = 0;
  for (const Event& e : log) {
    if (!window.contains(e.timestamp)) continue;
    (is_weekend(e.timestamp) ? weekend : weekday) += 1;
  }
  if (weekday == 0) throw MetricError("no weekday activity; weekend ratio undefined");
  return (weekend / weekend_days) / (weekday / weekday_days);
}

Scored r24_err(const EventLog& sim, const EventLog& gt, TimeWindow window) {
  std::int64_t weekday_hours = 0;
  for (std::int64_t h = hour_index(window.start); h * kSecondsPerHour < window.end; ++h) {
    if (!is_weekend(h * kSecondsPerHour)) ++weekday_hours;
  }
  if (weekday_hours < 48) throw MetricError("r24 needs at least 48 weekday hours");
  Scored a = circadian_autocorrelation(sim, window);
  Scored b = circadian_autocorrelation(gt, window);
  Scored out{std::abs(a.value - b.value), {}};
  for (auto& f : a.flags) out.flags.push_back("sim: " + f);
  for (auto& f : b.flags) out.flags.push_back("gt: " + f);
  return out;
}

Scored hod_emd(const EventLog& sim, const EventLog& gt) {
  return {emd_1d(hour_of_day_histogram(sim), hour_of_day_histogram(gt)), {}};
}

Scored wknd_drop_err(const EventLog& sim, const EventLog& gt, TimeWindow window) {
  return {std::abs(weekend_weekday_ratio(sim, window) - weekend_weekday_ratio(gt, window)), {}};
}

Scored burstiness_emd(const EventLog& sim, const EventLog& gt) {
  auto a = node_burstiness(sim);
  auto b = node_burstiness(gt);
  if (a.empty() || b.empty()) throw MetricError("no node with at least 3 events for burstiness");
  return {wasserstein_1d(std::move(a), std::move(b)), {}};
}

}  // namespace tnsim::metrics
