#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "tnsim/corpus.hpp"
#include "tnsim/metrics/common.hpp"

namespace tnsim::metrics {

/// Second edge relative to a first edge a->b.
enum class Motif2 { reciprocal, repeated, out_star, in_star, chain_forward, chain_backward };

/// Edge pattern of a strictly ordered triple.
enum class Motif3 { dyad_alternation, dyad_burst_reply, feed_forward_closure, three_cycle, broadcast_cross_link };

inline constexpr std::array<std::string_view, 6> kMotif2Names = {
    "Reciprocal", "Repeated", "OutStar", "InStar", "ChainForward", "ChainBackward"};
inline constexpr std::array<std::string_view, 5> kMotif3Names = {
    "DyadAlternation", "DyadBurstReply", "FeedForwardClosure", "ThreeCycle", "BroadcastCrossLink"};

template <std::size_t N>
struct MotifCensus {
  std::array<std::uint64_t, N> counts{};
  Timestamp delta = 0;

  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
  template <class E>
  std::uint64_t operator[](E cls) const { return counts[static_cast<std::size_t>(cls)]; }
  friend bool operator==(const MotifCensus&, const MotifCensus&) = default;
};

using Motif2Census = MotifCensus<6>;
using Motif3Census = MotifCensus<5>;

/// Ordered edge pairs with 0 < t2 - t1 <= delta that share a node. The
/// edges must be free of self-loops; order in the span does not matter.
Motif2Census motif_census_2(std::span<const Edge> edges, Timestamp delta);
Motif2Census motif_census_2(const EventLog& log, Timestamp delta);

/// Triples with t1 < t2 < t3 and t3 - t1 <= delta on three distinct nodes
/// a, b, c (two for the dyad classes) matching one of the five classes.
Motif3Census motif_census_3(std::span<const Edge> edges, Timestamp delta);
Motif3Census motif_census_3(const EventLog& log, Timestamp delta);

/// JSD between normalized censuses; a log without motifs contributes the
/// uniform distribution and a flag.
Scored motif_jsd(const EventLog& sim, const EventLog& gt, int arity, Timestamp delta);

}  // namespace tnsim::metrics
