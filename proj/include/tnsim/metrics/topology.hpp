#pragma once

#include <vector>

#include "tnsim/corpus.hpp"
#include "tnsim/metrics/common.hpp"

namespace tnsim::metrics {

/// Edges of the window bucketed by UTC day, self-loops dropped.
std::vector<std::vector<Edge>> daily_edges(const EventLog& log, TimeWindow window);

enum class DailyKind { transitivity, global_efficiency, reciprocity };

struct DailySeries {
  std::vector<double> values;  // one per UTC day of the window
  std::vector<std::string> flags;
};

/// Statistic of each day's aggregated graph; a day without edges is 0 and flagged.
DailySeries daily_topology_series(const EventLog& log, TimeWindow window, DailyKind kind);

/// RMSE between the daily series of both logs.
Scored topology_rmse(const EventLog& sim, const EventLog& gt, TimeWindow window, DailyKind kind);

/// Total degree (in plus out edge count, parallel edges counted) of every
/// node active on the day, as a normalized integer histogram.
std::vector<double> daily_degree_histogram(std::span<const Edge> day);

/// Mean over days of the EMD between integer-degree histograms. A day on
/// which only one log is silent compares against all mass at degree 0; a day
/// on which both are silent scores 0. Both cases are flagged.
Scored degdist_emd(const EventLog& sim, const EventLog& gt, TimeWindow window);

/// Ego-network overlap per node: the mean, over consecutive day pairs on
/// which the node has neighbors on both days, of |N1 & N2| / sqrt(|N1| |N2|).
/// Nodes without such a pair are absent.
std::vector<std::pair<AgentIndex, double>> ego_overlap(const EventLog& log, TimeWindow window);

/// EMD between the ego-overlap distributions binned into 20 equal bins on
/// [0, 1]. Throws MetricError when either log has no eligible node.
Scored topo_overlap_emd(const EventLog& sim, const EventLog& gt, TimeWindow window);

enum class CentralityKind { degree, betweenness };

/// Up to k nodes with the highest nonzero centrality, ties to the lower
/// agent index, sorted by index.
std::vector<AgentIndex> top_k(std::span<const Edge> day, CentralityKind kind, std::size_t k = 10);

/// Mean over days of the Jaccard index of the daily top-10 sets.
Scored centrality_jaccard(const EventLog& sim, const EventLog& gt, TimeWindow window, CentralityKind kind);

}  // namespace tnsim::metrics
