#include "tnsim/baselines.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "tnsim/errors.hpp"
#include "tnsim/rng.hpp"

namespace tnsim::baselines {

RewireResult rewire_degree_preserving(const EventLog& log, Timestamp t0, Timestamp t1, const RewireConfig& cfg) {
  std::vector<Edge> edges = expand_edges(window(log, t0, t1));
  if (edges.empty()) throw InputError("rewire: the window holds no edges");
  const std::size_t m = edges.size();

  // Strata of edge positions; a single stratum when not day-stratified.
  std::map<std::int64_t, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < m; ++i) strata[cfg.day_stratified ? day_index(edges[i].t) : 0].push_back(i);
  std::vector<const std::vector<std::size_t>*> stratum_of(m);
  for (const auto& [day, members] : strata) {
    for (std::size_t i : members) stratum_of[i] = &members;
  }

  RewireResult result;
  Rng swap_rng(stream_key(cfg.seed, "rewire-swap"));
  const std::size_t attempts = cfg.n_swaps.value_or(10 * m);
  for (std::size_t k = 0; k < attempts && m >= 2; ++k) {
    const std::size_t i = swap_rng.below(m);
    const auto& peers = *stratum_of[i];
    const std::size_t j = peers[swap_rng.below(peers.size())];
    Edge& e1 = edges[i];
    Edge& e2 = edges[j];
    if (i == j || e1.src == e2.dst || e2.src == e1.dst) {
      ++result.rejected_swaps;
      continue;
    }
    std::swap(e1.dst, e2.dst);
    ++result.accepted_swaps;
  }

  if (cfg.shuffle_timestamps) {
    Rng perm_rng(stream_key(cfg.seed, "rewire-time"));
    for (const auto& [day, members] : strata) {
      for (std::size_t k = members.size(); k > 1; --k) {
        const std::size_t r = perm_rng.below(k);
        std::swap(edges[members[k - 1]].t, edges[members[r]].t);
      }
    }
  }

  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.t, a.src, a.dst) < std::tie(b.t, b.src, b.dst); });
  std::vector<Event> events;
  events.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    Event e;
    e.id = k;
    e.sender = edges[k].src;
    e.recipients = {edges[k].dst};
    e.timestamp = edges[k].t;
    e.kind = EventKind::organic;
    events.push_back(std::move(e));
  }
  result.log = with_events(log, std::move(events));
  return result;
}

}  // namespace tnsim::baselines
