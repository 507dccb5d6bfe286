#pragma once

#include <span>
#include <vector>

#include "tnsim/corpus.hpp"

namespace tnsim {

/// Simple directed graph aggregated from an edge stream. Self-loops and
/// parallel edges are dropped. Nodes are the agents incident to at least
/// one remaining edge, stored in ascending agent index; adjacency lists
/// use local node positions and are sorted.
class Digraph {
 public:
  Digraph() = default;
  explicit Digraph(std::span<const Edge> edges);

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  bool empty() const noexcept { return nodes_.empty(); }

  std::span<const AgentIndex> nodes() const noexcept { return nodes_; }
  std::span<const int> out(int v) const { return out_[static_cast<std::size_t>(v)]; }
  std::span<const int> in(int v) const { return in_[static_cast<std::size_t>(v)]; }
  bool has_edge(int u, int v) const;

  /// Neighbor lists of the undirected simple collapse.
  std::vector<std::vector<int>> undirected() const;

 private:
  std::vector<AgentIndex> nodes_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  std::size_t edge_count_ = 0;
};

/// |E| / (n (n - 1)); 0 for fewer than two nodes.
double density(const Digraph& g);

/// Fraction of directed edges whose reverse edge is present; 0 without edges.
double reciprocity(const Digraph& g);

/// 3 * triangles / connected triples on the undirected collapse; 0 when there
/// are no connected triples.
double transitivity(const Digraph& g);

/// Mean inverse shortest-path length over ordered pairs of distinct nodes on
/// the undirected collapse; disconnected pairs contribute 0.
double global_efficiency(const Digraph& g);

/// In-degree plus out-degree of every node, by local position.
std::vector<double> degree_centrality(const Digraph& g);

/// Directed, unweighted betweenness (sum over ordered pairs s != v != t of
/// sigma_st(v) / sigma_st), by local position.
std::vector<double> betweenness_centrality(const Digraph& g);

}  // namespace tnsim
