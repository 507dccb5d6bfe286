#include "doctest.h"
#include "oracles.hpp"
#include "tnsim/metrics/motifs.hpp"

using namespace tnsim;
using namespace tnsim::metrics;

namespace {

constexpr Timestamp kMonday = 1003708800;

Edge e(AgentIndex s, AgentIndex d, Timestamp t) { return {s, d, t}; }

}  // namespace

TEST_CASE("two-edge classes by hand") {
  const std::vector<Edge> es{e(0, 1, 0), e(1, 0, 10), e(0, 1, 20), e(0, 2, 30), e(3, 1, 40), e(1, 2, 50), e(4, 0, 60)};
  const auto c = motif_census_2(es, 100);
  // From the first edge 0->1 every class occurs once.
  CHECK(c[Motif2::reciprocal] == 2);  // (0->1,1->0) and (1->0,0->1)
  CHECK(c.counts == oracle::census_2(es, 100));
  CHECK(c.delta == 100);
}

TEST_CASE("window bounds are (t1, t1 + delta]") {
  const std::vector<Edge> es{e(0, 1, 0), e(0, 1, 0), e(0, 1, 5), e(0, 1, 6)};
  const auto c = motif_census_2(es, 5);
  // Same-second pairs do not count; the pair at exactly delta does.
  CHECK(c[Motif2::repeated] == 3);
  CHECK(motif_census_2(es, 4)[Motif2::repeated] == 1);
}

TEST_CASE("three-edge classes by hand") {
  const Timestamp d = 100;
  CHECK(motif_census_3(std::vector<Edge>{e(0, 1, 0), e(1, 0, 1), e(0, 1, 2)}, d)[Motif3::dyad_alternation] == 1);
  CHECK(motif_census_3(std::vector<Edge>{e(0, 1, 0), e(0, 1, 1), e(1, 0, 2)}, d)[Motif3::dyad_burst_reply] == 1);
  CHECK(motif_census_3(std::vector<Edge>{e(0, 1, 0), e(1, 2, 1), e(0, 2, 2)}, d)[Motif3::feed_forward_closure] == 1);
  CHECK(motif_census_3(std::vector<Edge>{e(0, 1, 0), e(1, 2, 1), e(2, 0, 2)}, d)[Motif3::three_cycle] == 1);
  CHECK(motif_census_3(std::vector<Edge>{e(0, 1, 0), e(0, 2, 1), e(1, 2, 2)}, d)[Motif3::broadcast_cross_link] == 1);
  CHECK(motif_census_3(std::vector<Edge>{e(0, 1, 0), e(0, 2, 1), e(2, 1, 2)}, d)[Motif3::broadcast_cross_link] == 1);
  // Ties in time are not strictly ordered.
  CHECK(motif_census_3(std::vector<Edge>{e(0, 1, 0), e(1, 2, 1), e(2, 0, 1)}, d).total() == 0);
  // The whole triple must fit in delta.
  CHECK(motif_census_3(std::vector<Edge>{e(0, 1, 0), e(1, 2, 1), e(2, 0, 101)}, d).total() == 0);
}

TEST_CASE("censuses ignore input order") {
  const auto log = oracle::random_log(21, 5, 60, kMonday, kSecondsPerDay, 300);
  auto edges = expand_edges(log);
  const auto a2 = motif_census_2(edges, 4 * kSecondsPerHour);
  const auto a3 = motif_census_3(edges, 4 * kSecondsPerHour);
  std::reverse(edges.begin(), edges.end());
  CHECK(motif_census_2(edges, 4 * kSecondsPerHour) == a2);
  CHECK(motif_census_3(edges, 4 * kSecondsPerHour) == a3);
  CHECK(motif_census_2(log, 4 * kSecondsPerHour) == a2);
}

TEST_CASE("random logs against brute force") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto log = oracle::random_log(s, 4, 50, kMonday, kSecondsPerDay, 600, 0.3);
    const auto edges = expand_edges(log);
    for (Timestamp delta : {kSecondsPerHour, 6 * kSecondsPerHour}) {
      CHECK(motif_census_2(edges, delta).counts == oracle::census_2(edges, delta));
      CHECK(motif_census_3(edges, delta).counts == oracle::census_3(edges, delta));
    }
  }
}

TEST_CASE("motif jsd") {
  const auto a = oracle::random_log(1, 5, 80, kMonday, kSecondsPerDay, 60);
  CHECK(motif_jsd(a, a, 2, kSecondsPerHour).value == 0.0);
  const auto empty = oracle::random_log(1, 5, 0, kMonday, kSecondsPerDay);
  const auto s = motif_jsd(empty, a, 3, kSecondsPerHour);
  CHECK(s.value > 0);
  CHECK_FALSE(s.flags.empty());
  CHECK_THROWS(motif_jsd(a, a, 4, kSecondsPerHour));
}
