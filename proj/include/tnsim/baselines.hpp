#pragma once

#include <cstdint>
#include <optional>

#include "tnsim/corpus.hpp"

namespace tnsim::baselines {

struct RewireConfig {
  std::optional<std::size_t> n_swaps;  // swap attempts; 10 x edge count when unset
  std::uint64_t seed = 42;
  /// Keep swaps and the timestamp permutation inside each UTC day, which
  /// also preserves every node's daily degrees. Off: window-wide.
  bool day_stratified = true;
  bool shuffle_timestamps = true;
};

struct RewireResult {
  EventLog log;
  std::size_t accepted_swaps = 0;
  std::size_t rejected_swaps = 0;
};

/// Double-edge swaps (a->b, c->d) -> (a->d, c->b) on the directed edge
/// multiset of [t0, t1) after recipient expansion, rejecting self-loops;
/// parallel edges are allowed. Timestamps are then permuted among the edges.
/// The output has one single-recipient organic event per edge with fresh
/// ids in chronological order and no thread or body. A single edge comes
/// back unchanged; an empty window throws InputError.
RewireResult rewire_degree_preserving(const EventLog& log, Timestamp t0, Timestamp t1, const RewireConfig& cfg);

}  // namespace tnsim::baselines
