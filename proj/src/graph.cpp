#include "tnsim/graph.hpp"

#include <algorithm>
#include <iterator>
#include <utility>

namespace tnsim {

Digraph::Digraph(std::span<const Edge> edges) {
  std::vector<std::pair<AgentIndex, AgentIndex>> pairs;
  pairs.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.src != e.dst) pairs.emplace_back(e.src, e.dst);
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  for (const auto& [u, v] : pairs) {
    nodes_.push_back(u);
    nodes_.push_back(v);
  }
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());

  auto local = [this](AgentIndex a) {
    return static_cast<int>(std::lower_bound(nodes_.begin(), nodes_.end(), a) - nodes_.begin());
  };
  out_.assign(nodes_.size(), {});
  in_.assign(nodes_.size(), {});
  for (const auto& [u, v] : pairs) {
    const int lu = local(u);
    const int lv = local(v);
    out_[static_cast<std::size_t>(lu)].push_back(lv);
    in_[static_cast<std::size_t>(lv)].push_back(lu);
  }
  for (auto& l : in_) std::sort(l.begin(), l.end());
  edge_count_ = pairs.size();
}

bool Digraph::has_edge(int u, int v) const {
  const auto& l = out_[static_cast<std::size_t>(u)];
  return std::binary_search(l.begin(), l.end(), v);
}

std::vector<std::vector<int>> Digraph::undirected() const {
  std::vector<std::vector<int>> adj(nodes_.size());
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    std::merge(out_[v].begin(), out_[v].end(), in_[v].begin(), in_[v].end(),
               std::back_inserter(adj[v]));
    adj[v].erase(std::unique(adj[v].begin(), adj[v].end()), adj[v].end());
  }
  return adj;
}

double density(const Digraph& g) {
  const double n = static_cast<double>(g.node_count());
  if (n < 2) return 0.0;
  return static_cast<double>(g.edge_count()) / (n * (n - 1));
}

double reciprocity(const Digraph& g) {
  if (g.edge_count() == 0) return 0.0;
  std::size_t mutual = 0;
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    for (int v : g.out(static_cast<int>(u))) {
      if (g.has_edge(v, static_cast<int>(u))) ++mutual;
    }
  }
  return static_cast<double>(mutual) / static_cast<double>(g.edge_count());
}

double transitivity(const Digraph& g) {
  const auto adj = g.undirected();
  double triangles_x3 = 0;  // each triangle is seen once per vertex
  double triples = 0;
  std::vector<char> mark(adj.size(), 0);
  for (std::size_t v = 0; v < adj.size(); ++v) {
    const double d = static_cast<double>(adj[v].size());
    triples += d * (d - 1) / 2;
    for (int u : adj[v]) mark[static_cast<std::size_t>(u)] = 1;
    double closed = 0;
    for (int u : adj[v]) {
      for (int w : adj[static_cast<std::size_t>(u)]) {
        if (w > u && mark[static_cast<std::size_t>(w)]) closed += 1;
      }
    }
    for (int u : adj[v]) mark[static_cast<std::size_t>(u)] = 0;
    triangles_x3 += closed;
  }
  return triples > 0 ? triangles_x3 / triples : 0.0;
}

double global_efficiency(const Digraph& g) {
  const auto adj = g.undirected();
  const std::size_t n = adj.size();
  if (n < 2) return 0.0;
  double total = 0;
  std::vector<int> dist(n);
  std::vector<int> queue;
  queue.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    queue.clear();
    queue.push_back(static_cast<int>(s));
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int u = queue[head];
      for (int w : adj[static_cast<std::size_t>(u)]) {
        if (dist[static_cast<std::size_t>(w)] < 0) {
          dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
          total += 1.0 / dist[static_cast<std::size_t>(w)];
          queue.push_back(w);
        }
      }
    }
  }
  return total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

std::vector<double> degree_centrality(const Digraph& g) {
  std::vector<double> deg(g.node_count());
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    deg[v] = static_cast<double>(g.out(static_cast<int>(v)).size() + g.in(static_cast<int>(v)).size());
  }
  return deg;
}

std::vector<double> betweenness_centrality(const Digraph& g) {
  // Brandes accumulation over BFS shortest-path DAGs.
  const std::size_t n = g.node_count();
  std::vector<double> bc(n, 0.0);
  std::vector<int> dist(n);
  std::vector<double> sigma(n);
  std::vector<double> delta(n);
  std::vector<std::vector<int>> preds(n);
  std::vector<int> order;
  order.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : preds) p.clear();
    order.clear();
    dist[s] = 0;
    sigma[s] = 1;
    order.push_back(static_cast<int>(s));
    for (std::size_t head = 0; head < order.size(); ++head) {
      const auto u = static_cast<std::size_t>(order[head]);
      for (int wi : g.out(static_cast<int>(u))) {
        const auto w = static_cast<std::size_t>(wi);
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          order.push_back(wi);
        }
        if (dist[w] == dist[u] + 1) {
          sigma[w] += sigma[u];
          preds[w].push_back(static_cast<int>(u));
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto w = static_cast<std::size_t>(*it);
      for (int vi : preds[w]) {
        const auto v = static_cast<std::size_t>(vi);
        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      }
      if (w != s) bc[w] += delta[w];
    }
  }
  return bc;
}

}  // namespace tnsim
