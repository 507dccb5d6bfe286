#include "tnsim/metrics/motifs.hpp"

#include <algorithm>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "tnsim/metrics/distances.hpp"

namespace tnsim::metrics {

namespace {

std::uint64_t pair_key(AgentIndex a, AgentIndex b) { return (std::uint64_t{a} << 32) | b; }

std::vector<Edge> time_sorted(std::span<const Edge> edges) {
  std::vector<Edge> out(edges.begin(), edges.end());
  std::stable_sort(out.begin(), out.end(), [](const Edge& x, const Edge& y) { return x.t < y.t; });
  return out;
}

// Number of entries of a sorted list in (lo, hi].
std::uint64_t count_in(const std::vector<Timestamp>& ts, Timestamp lo, Timestamp hi) {
  if (hi <= lo) return 0;
  return static_cast<std::uint64_t>(std::upper_bound(ts.begin(), ts.end(), hi) -
                                    std::upper_bound(ts.begin(), ts.end(), lo));
}

}  // namespace

Motif2Census motif_census_2(std::span<const Edge> edges, Timestamp delta) {
  Motif2Census census;
  census.delta = delta;
  const std::vector<Edge> es = time_sorted(edges);
  AgentIndex bound = 0;
  for (const Edge& e : es) bound = std::max({bound, e.src + 1, e.dst + 1});
  std::vector<std::int64_t> out(bound, 0), in(bound, 0);
  std::unordered_map<std::uint64_t, std::int64_t> pair;

  // Window holds edges with t in (t_i, t_i + delta], as [lo, hi).
  std::size_t lo = 0, hi = 0;
  auto add = [&](const Edge& e, std::int64_t sign) {
    out[e.src] += sign;
    in[e.dst] += sign;
    pair[pair_key(e.src, e.dst)] += sign;
  };
  auto pair_count = [&](AgentIndex a, AgentIndex b) {
    auto it = pair.find(pair_key(a, b));
    return it == pair.end() ? std::int64_t{0} : it->second;
  };
  for (const Edge& e1 : es) {
    while (hi < es.size() && es[hi].t <= e1.t + delta) add(es[hi++], +1);
    while (lo < hi && es[lo].t <= e1.t) add(es[lo++], -1);
    const AgentIndex a = e1.src, b = e1.dst;
    const std::int64_t ab = pair_count(a, b), ba = pair_count(b, a);
    auto& c = census.counts;
    c[static_cast<std::size_t>(Motif2::repeated)] += static_cast<std::uint64_t>(ab);
    c[static_cast<std::size_t>(Motif2::out_star)] += static_cast<std::uint64_t>(out[a] - ab);
    c[static_cast<std::size_t>(Motif2::in_star)] += static_cast<std::uint64_t>(in[b] - ab);
    c[static_cast<std::size_t>(Motif2::reciprocal)] += static_cast<std::uint64_t>(ba);
    c[static_cast<std::size_t>(Motif2::chain_forward)] += static_cast<std::uint64_t>(out[b] - ba);
    c[static_cast<std::size_t>(Motif2::chain_backward)] += static_cast<std::uint64_t>(in[a] - ba);
  }
  return census;
}

Motif2Census motif_census_2(const EventLog& log, Timestamp delta) {
  return motif_census_2(expand_edges(log), delta);
}

Motif3Census motif_census_3(std::span<const Edge> edges, Timestamp delta) {
  Motif3Census census;
  census.delta = delta;
  const std::vector<Edge> es = time_sorted(edges);
  AgentIndex bound = 0;
  for (const Edge& e : es) bound = std::max({bound, e.src + 1, e.dst + 1});

  // Outgoing edges per node and timestamps per ordered pair, both sorted.
  std::vector<std::vector<const Edge*>> outgoing(bound);
  std::unordered_map<std::uint64_t, std::vector<Timestamp>> pair_times;
  for (const Edge& e : es) {
    outgoing[e.src].push_back(&e);
    pair_times[pair_key(e.src, e.dst)].push_back(e.t);
  }
  static const std::vector<Timestamp> kNone;
  auto times = [&](AgentIndex u, AgentIndex v) -> const std::vector<Timestamp>& {
    auto it = pair_times.find(pair_key(u, v));
    return it == pair_times.end() ? kNone : it->second;
  };
  auto& c = census.counts;

  for (const Edge& e1 : es) {
    const AgentIndex a = e1.src, b = e1.dst;
    const Timestamp t_end = e1.t + delta;
    // Every class has its second edge leaving a or b.
    for (AgentIndex src : {a, b}) {
      const auto& list = outgoing[src];
      auto it = std::upper_bound(list.begin(), list.end(), e1.t,
                                 [](Timestamp t, const Edge* e) { return t < e->t; });
      for (; it != list.end() && (*it)->t <= t_end; ++it) {
        const Edge& e2 = **it;
        if (src == a && e2.dst == b) {
          c[static_cast<std::size_t>(Motif3::dyad_burst_reply)] += count_in(times(b, a), e2.t, t_end);
        } else if (src == a) {
          const AgentIndex x = e2.dst;
          c[static_cast<std::size_t>(Motif3::broadcast_cross_link)] +=
              count_in(times(b, x), e2.t, t_end) + count_in(times(x, b), e2.t, t_end);
        } else if (e2.dst == a) {
          c[static_cast<std::size_t>(Motif3::dyad_alternation)] += count_in(times(a, b), e2.t, t_end);
        } else {
          const AgentIndex x = e2.dst;
          c[static_cast<std::size_t>(Motif3::feed_forward_closure)] += count_in(times(a, x), e2.t, t_end);
          c[static_cast<std::size_t>(Motif3::three_cycle)] += count_in(times(x, a), e2.t, t_end);
        }
      }
    }
  }
  return census;
}

Motif3Census motif_census_3(const EventLog& log, Timestamp delta) {
  return motif_census_3(expand_edges(log), delta);
}

namespace {

template <std::size_t N>
Eigen::VectorXd distribution(const MotifCensus<N>& census, const char* which, Scored& s) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(N));
  const double total = static_cast<double>(census.total());
  if (total == 0) {
    p.setConstant(1.0 / N);
    s.flags.push_back(std::string(which) + " log has no motifs; uniform distribution used");
    return p;
  }
  for (std::size_t k = 0; k < N; ++k) p(static_cast<Eigen::Index>(k)) = static_cast<double>(census.counts[k]) / total;
  return p;
}

}  // namespace

Scored motif_jsd(const EventLog& sim, const EventLog& gt, int arity, Timestamp delta) {
  Scored s;
  if (arity == 2) {
    const auto p = distribution(motif_census_2(sim, delta), "simulated", s);
    const auto q = distribution(motif_census_2(gt, delta), "ground-truth", s);
    s.value = jsd(p, q);
  } else if (arity == 3) {
    const auto p = distribution(motif_census_3(sim, delta), "simulated", s);
    const auto q = distribution(motif_census_3(gt, delta), "ground-truth", s);
    s.value = jsd(p, q);
  } else {
    throw std::invalid_argument("motif_jsd: arity must be 2 or 3");
  }
  return s;
}

}  // namespace tnsim::metrics
