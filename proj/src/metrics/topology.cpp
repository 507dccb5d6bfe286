#include "tnsim/metrics/topology.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <Eigen/Core>

#include "tnsim/graph.hpp"
#include "tnsim/metrics/distances.hpp"

namespace tnsim::metrics {

std::vector<std::vector<Edge>> daily_edges(const EventLog& log, TimeWindow window) {
  std::vector<std::vector<Edge>> days(static_cast<std::size_t>(std::max<std::int64_t>(0, window.day_count())));
  for (const Edge& e : expand_edges(log)) {
    if (!window.contains(e.t)) continue;
    days[static_cast<std::size_t>(day_index(e.t) - window.first_day())].push_back(e);
  }
  return days;
}

DailySeries daily_topology_series(const EventLog& log, TimeWindow window, DailyKind kind) {
  DailySeries s;
  std::size_t empty_days = 0;
  for (const auto& day : daily_edges(log, window)) {
    const Digraph g(day);
    if (g.edge_count() == 0) {
      ++empty_days;
      s.values.push_back(0.0);
      continue;
    }
    switch (kind) {
      case DailyKind::transitivity: s.values.push_back(transitivity(g)); break;
      case DailyKind::global_efficiency: s.values.push_back(global_efficiency(g)); break;
      case DailyKind::reciprocity: s.values.push_back(reciprocity(g)); break;
    }
  }
  if (empty_days) s.flags.push_back(std::to_string(empty_days) + " day(s) without edges scored 0");
  return s;
}

Scored topology_rmse(const EventLog& sim, const EventLog& gt, TimeWindow window, DailyKind kind) {
  if (window.day_count() < 1) throw MetricError("window covers no day");
  const DailySeries a = daily_topology_series(sim, window, kind);
  const DailySeries b = daily_topology_series(gt, window, kind);
  Scored s{rmse(a.values, b.values), {}};
  for (const auto& f : a.flags) s.flags.push_back("simulated: " + f);
  for (const auto& f : b.flags) s.flags.push_back("ground truth: " + f);
  return s;
}

std::vector<double> daily_degree_histogram(std::span<const Edge> day) {
  std::map<AgentIndex, std::size_t> degree;
  for (const Edge& e : day) {
    if (e.src == e.dst) continue;
    ++degree[e.src];
    ++degree[e.dst];
  }
  std::size_t max_degree = 0;
  for (const auto& [node, d] : degree) max_degree = std::max(max_degree, d);
  std::vector<double> hist(degree.empty() ? 1 : max_degree + 1, 0.0);
  if (degree.empty()) {
    hist[0] = 1.0;
    return hist;
  }
  for (const auto& [node, d] : degree) hist[d] += 1.0 / static_cast<double>(degree.size());
  return hist;
}

Scored degdist_emd(const EventLog& sim, const EventLog& gt, TimeWindow window) {
  if (window.day_count() < 1) throw MetricError("window covers no day");
  const auto sim_days = daily_edges(sim, window);
  const auto gt_days = daily_edges(gt, window);
  Scored s;
  std::size_t one_silent = 0, both_silent = 0;
  double total = 0;
  for (std::size_t d = 0; d < sim_days.size(); ++d) {
    const bool se = sim_days[d].empty(), ge = gt_days[d].empty();
    if (se && ge) {
      ++both_silent;
      continue;
    }
    if (se || ge) ++one_silent;
    std::vector<double> p = daily_degree_histogram(sim_days[d]);
    std::vector<double> q = daily_degree_histogram(gt_days[d]);
    const std::size_t n = std::max(p.size(), q.size());
    p.resize(n, 0.0);
    q.resize(n, 0.0);
    total += emd_1d(Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(n)),
                    Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(n)));
  }
  s.value = total / static_cast<double>(sim_days.size());
  if (one_silent) s.flags.push_back(std::to_string(one_silent) + " day(s) silent in one log only");
  if (both_silent) s.flags.push_back(std::to_string(both_silent) + " day(s) silent in both logs scored 0");
  return s;
}

std::vector<std::pair<AgentIndex, double>> ego_overlap(const EventLog& log, TimeWindow window) {
  const auto days = daily_edges(log, window);
  std::vector<std::map<AgentIndex, std::set<AgentIndex>>> nbrs(days.size());
  for (std::size_t d = 0; d < days.size(); ++d) {
    for (const Edge& e : days[d]) {
      nbrs[d][e.src].insert(e.dst);
      nbrs[d][e.dst].insert(e.src);
    }
  }
  std::map<AgentIndex, std::pair<double, int>> acc;
  for (std::size_t d = 0; d + 1 < days.size(); ++d) {
    for (const auto& [v, n1] : nbrs[d]) {
      auto it = nbrs[d + 1].find(v);
      if (it == nbrs[d + 1].end()) continue;
      const auto& n2 = it->second;
      std::size_t common = 0;
      for (AgentIndex u : n1) common += n2.count(u);
      auto& [sum, count] = acc[v];
      sum += static_cast<double>(common) / std::sqrt(static_cast<double>(n1.size() * n2.size()));
      ++count;
    }
  }
  std::vector<std::pair<AgentIndex, double>> out;
  for (const auto& [v, sc] : acc) out.emplace_back(v, sc.first / sc.second);
  return out;
}

Scored topo_overlap_emd(const EventLog& sim, const EventLog& gt, TimeWindow window) {
  if (window.day_count() < 2) throw MetricError("ego overlap needs at least two days");
  constexpr int kBins = 20;
  auto binned = [&](const EventLog& log, const char* which) {
    const auto overlap = ego_overlap(log, window);
    if (overlap.empty()) throw MetricError(std::string(which) + " log has no node active on consecutive days");
    Eigen::VectorXd h = Eigen::VectorXd::Zero(kBins);
    for (const auto& [v, c] : overlap) h(std::clamp(static_cast<int>(c * kBins), 0, kBins - 1)) += 1;
    return Histogram::from_counts(h);
  };
  return Scored{emd_1d(binned(sim, "simulated"), binned(gt, "ground-truth"), 1.0 / kBins), {}};
}

std::vector<AgentIndex> top_k(std::span<const Edge> day, CentralityKind kind, std::size_t k) {
  const Digraph g(day);
  const std::vector<double> c =
      kind == CentralityKind::degree ? degree_centrality(g) : betweenness_centrality(g);
  // Rounding keeps accumulation noise from reordering exact ties.
  std::vector<std::pair<double, AgentIndex>> ranked;
  for (std::size_t v = 0; v < c.size(); ++v) {
    const double r = std::round(c[v] * 1e9) / 1e9;
    if (r > 0) ranked.emplace_back(-r, g.nodes()[v]);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<AgentIndex> out;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) out.push_back(ranked[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

Scored centrality_jaccard(const EventLog& sim, const EventLog& gt, TimeWindow window, CentralityKind kind) {
  constexpr std::size_t k = 10;
  if (window.day_count() < 1) throw MetricError("window covers no day");
  const auto sim_days = daily_edges(sim, window);
  const auto gt_days = daily_edges(gt, window);
  Scored s;
  std::size_t short_days = 0, empty_days = 0;
  double total = 0;
  for (std::size_t d = 0; d < sim_days.size(); ++d) {
    const auto a = top_k(sim_days[d], kind, k);
    const auto b = top_k(gt_days[d], kind, k);
    if (a.size() < k || b.size() < k) ++short_days;
    if (a.empty() && b.empty()) {
      ++empty_days;
      total += 1.0;
      continue;
    }
    std::vector<AgentIndex> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    const double uni = static_cast<double>(a.size() + b.size() - common.size());
    total += static_cast<double>(common.size()) / uni;
  }
  s.value = total / static_cast<double>(sim_days.size());
  if (short_days) s.flags.push_back(std::to_string(short_days) + " day(s) with fewer than 10 ranked nodes");
  if (empty_days) s.flags.push_back(std::to_string(empty_days) + " day(s) with no ranked node in either log scored 1");
  return s;
}

}  // namespace tnsim::metrics
