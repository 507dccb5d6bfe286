#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tnsim/corpus.hpp"
#include "tnsim/metrics/common.hpp"
#include "tnsim/metrics/distances.hpp"

namespace tnsim::metrics {

/// Event counts per UTC hour covering the window.
std::vector<double> hourly_counts(const EventLog& log, TimeWindow window);

/// Pearson correlation of (X_h, X_{h+24}) over the hourly series, keeping
/// only pairs where both hours fall on weekdays. A constant series (or fewer
/// than two pairs) yields 0 with a flag.
Scored circadian_autocorrelation(const EventLog& log, TimeWindow window);

/// 24-bin hour-of-day histogram of event timestamps, normalized.
Histogram hour_of_day_histogram(const EventLog& log);

/// (sigma - mu) / (sigma + mu) over consecutive gaps, both moments dividing
/// by the gap count. nullopt for fewer than 3 timestamps or all-zero gaps.
std::optional<double> burstiness(std::span<const Timestamp> sorted_times);

/// Burstiness for every sender with at least 3 sent events, by agent index.
std::vector<double> node_burstiness(const EventLog& log);

/// Mean daily count on weekend days divided by the mean on weekdays.
double weekend_weekday_ratio(const EventLog& log, TimeWindow window);

Scored r24_err(const EventLog& sim, const EventLog& gt, TimeWindow window);
Scored hod_emd(const EventLog& sim, const EventLog& gt);
Scored wknd_drop_err(const EventLog& sim, const EventLog& gt, TimeWindow window);
Scored burstiness_emd(const EventLog& sim, const EventLog& gt);

}  // namespace tnsim::metrics
