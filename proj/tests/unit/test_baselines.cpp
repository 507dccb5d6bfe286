#include <algorithm>
#include <map>

#include "doctest.h"
#include "oracles.hpp"
#include "tnsim/baselines.hpp"
#include "tnsim/errors.hpp"

using namespace tnsim;
using namespace tnsim::baselines;

namespace {

constexpr Timestamp kMonday = 1003708800;

std::map<std::pair<AgentIndex, std::int64_t>, std::pair<int, int>> daily_degrees(const EventLog& log) {
  std::map<std::pair<AgentIndex, std::int64_t>, std::pair<int, int>> d;
  for (const Edge& e : expand_edges(log)) {
    ++d[{e.src, day_index(e.t)}].first;
    ++d[{e.dst, day_index(e.t)}].second;
  }
  return d;
}

}  // namespace

TEST_CASE("rewiring keeps daily degrees and timestamps") {
  const auto log = oracle::random_log(12, 8, 200, kMonday, 5 * kSecondsPerDay, 60, 0.3);
  const auto r = rewire_degree_preserving(log, kMonday, kMonday + 5 * kSecondsPerDay, {});
  CHECK(r.log.size() == expand_edges(log).size());
  CHECK(daily_degrees(r.log) == daily_degrees(log));
  CHECK(r.accepted_swaps > 0);
  CHECK(r.accepted_swaps + r.rejected_swaps == 10 * r.log.size());
  std::uint64_t expected_id = 0;
  for (const Event& e : r.log) {
    CHECK(e.id == expected_id++);
    CHECK(e.recipients.size() == 1);
    CHECK(e.recipients[0] != e.sender);
    CHECK_FALSE(e.thread);
    CHECK_FALSE(e.body);
  }
  CHECK(expand_edges(r.log) != expand_edges(log));
}

TEST_CASE("rewiring is seeded") {
  const auto log = oracle::random_log(13, 6, 100, kMonday, 2 * kSecondsPerDay);
  RewireConfig a, b;
  b.seed = 43;
  const Timestamp t1 = kMonday + 2 * kSecondsPerDay;
  CHECK(rewire_degree_preserving(log, kMonday, t1, a).log == rewire_degree_preserving(log, kMonday, t1, a).log);
  CHECK_FALSE(rewire_degree_preserving(log, kMonday, t1, a).log == rewire_degree_preserving(log, kMonday, t1, b).log);
}

TEST_CASE("window-wide rewiring keeps total degrees") {
  const auto log = oracle::random_log(14, 6, 100, kMonday, 3 * kSecondsPerDay);
  RewireConfig cfg;
  cfg.day_stratified = false;
  cfg.shuffle_timestamps = false;
  const auto r = rewire_degree_preserving(log, kMonday, kMonday + 3 * kSecondsPerDay, cfg);
  std::map<AgentIndex, std::pair<int, int>> before, after;
  for (const Edge& e : expand_edges(log)) ++before[e.src].first, ++before[e.dst].second;
  for (const Edge& e : expand_edges(r.log)) ++after[e.src].first, ++after[e.dst].second;
  CHECK(before == after);
}

TEST_CASE("degenerate inputs") {
  const auto log = oracle::random_log(15, 3, 1, kMonday, 100, 1, 0.0);
  const auto one = rewire_degree_preserving(log, kMonday, kMonday + 100, {});
  REQUIRE(one.log.size() == 1);
  CHECK(one.log[0].sender == log[0].sender);
  CHECK(one.log[0].recipients == log[0].recipients);
  CHECK(one.log[0].timestamp == log[0].timestamp);
  CHECK_THROWS_AS(rewire_degree_preserving(log, 0, 10, {}), InputError);
}
