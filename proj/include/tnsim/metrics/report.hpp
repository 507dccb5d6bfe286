#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tnsim/corpus.hpp"
#include "tnsim/metrics/common.hpp"
#include "tnsim/metrics/regret.hpp"

namespace tnsim::metrics {

struct MetricEntry {
  std::string name;
  Category category = Category::temporal_rhythms;
  bool higher_is_better = false;
  std::optional<double> value;  // empty when skipped
  std::vector<std::string> flags;
  std::optional<std::string> skipped;
};

struct MetricsReport {
  TimeWindow window;
  std::vector<MetricEntry> entries;

  const MetricEntry* find(std::string_view name) const;
};

/// Metric names in report order.
const std::vector<std::string>& metric_names();

/// Drops every event whose sender or some recipient is a trigger agent and
/// removes the triggers from the registry.
EventLog exclude_triggers(const EventLog& log, std::span<const AgentIndex> triggers);

/// All 15 metrics on the non-trigger subnetwork of both logs restricted to
/// the window. A metric that cannot be computed is kept as a skipped entry.
MetricsReport evaluate_all(const EventLog& sim, const EventLog& gt, std::span<const AgentIndex> triggers,
                           TimeWindow window);

std::string report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const std::string& text);
/// name,category,value,direction,flags
std::string report_to_csv(const MetricsReport& report);

}  // namespace tnsim::metrics
