#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tnsim/time.hpp"

namespace tnsim::metrics {

/// A metric value plus notes about degenerate inputs that were tolerated
/// (e.g. a constant series whose autocorrelation is defined as 0).
struct Scored {
  double value = 0;
  std::vector<std::string> flags;
};

/// A metric is undefined for its inputs; evaluate_all records it as skipped.
class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TimeWindow {
  Timestamp start = 0;
  Timestamp end = 0;  // exclusive

  Timestamp duration() const { return end - start; }
  bool contains(Timestamp t) const { return start <= t && t < end; }
  /// UTC day indices touched by the window, [first, last].
  std::int64_t first_day() const { return day_index(start); }
  std::int64_t last_day() const { return day_index(end - 1); }
  std::int64_t day_count() const { return end > start ? last_day() - first_day() + 1 : 0; }
};

}  // namespace tnsim::metrics
