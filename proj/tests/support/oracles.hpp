// Reference implementations used only by tests: brute-force motif
// enumeration, a Kolmogorov-Smirnov p-value, random logs and quadrature.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tnsim/corpus.hpp"
#include "tnsim/rng.hpp"

namespace oracle {

using tnsim::Edge;
using tnsim::Timestamp;

inline int classify_pair(const Edge& e1, const Edge& e2) {
  const auto a = e1.src, b = e1.dst;
  if (e2.src == b && e2.dst == a) return 0;  // Reciprocal
  if (e2.src == a && e2.dst == b) return 1;  // Repeated
  if (e2.src == a) return 2;                 // OutStar
  if (e2.dst == b) return 3;                 // InStar
  if (e2.src == b) return 4;                 // ChainForward
  if (e2.dst == a) return 5;                 // ChainBackward
  return -1;
}

inline std::array<std::uint64_t, 6> census_2(const std::vector<Edge>& es, Timestamp delta) {
  std::array<std::uint64_t, 6> c{};
  for (const Edge& e1 : es) {
    for (const Edge& e2 : es) {
      const Timestamp dt = e2.t - e1.t;
      if (dt <= 0 || dt > delta) continue;
      const int k = classify_pair(e1, e2);
      if (k >= 0) ++c[static_cast<std::size_t>(k)];
    }
  }
  return c;
}

inline int classify_triple(const Edge& e1, const Edge& e2, const Edge& e3) {
  const auto a = e1.src, b = e1.dst;
  auto is = [](const Edge& e, tnsim::AgentIndex s, tnsim::AgentIndex d) { return e.src == s && e.dst == d; };
  if (is(e2, b, a) && is(e3, a, b)) return 0;  // DyadAlternation
  if (is(e2, a, b) && is(e3, b, a)) return 1;  // DyadBurstReply
  if (e2.src == b && e2.dst != a) {
    const auto c = e2.dst;
    if (is(e3, a, c)) return 2;  // FeedForwardClosure
    if (is(e3, c, a)) return 3;  // ThreeCycle
  }
  if (e2.src == a && e2.dst != b) {
    const auto c = e2.dst;
    if (is(e3, b, c) || is(e3, c, b)) return 4;  // BroadcastCrossLink
  }
  return -1;
}

inline std::array<std::uint64_t, 5> census_3(const std::vector<Edge>& es, Timestamp delta) {
  std::array<std::uint64_t, 5> c{};
  for (const Edge& e1 : es) {
    for (const Edge& e2 : es) {
      if (e2.t <= e1.t || e2.t - e1.t > delta) continue;
      for (const Edge& e3 : es) {
        if (e3.t <= e2.t || e3.t - e1.t > delta) continue;
        const int k = classify_triple(e1, e2, e3);
        if (k >= 0) ++c[static_cast<std::size_t>(k)];
      }
    }
  }
  return c;
}

/// Asymptotic Kolmogorov distribution with Stephens' small-sample correction.
inline double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0;
  for (int k = 1; k <= 200; ++k) {
    const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

/// One-sample KS statistic of `xs` against the continuous CDF `cdf`.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (static_cast<double>(i) + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Adaptive Gauss-Kronrod over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14);
}

inline std::vector<std::string> agent_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < n; ++k) {
    std::string s = "agent";
    if (k < 10) s += '0';
    names.push_back(s + std::to_string(k));
  }
  return names;
}

/// Random log: senders and single or double recipients uniform over the
/// agents (no self-loops), timestamps uniform on [t0, t0 + span) rounded
/// down to `grain` seconds so that ties occur.
inline tnsim::EventLog random_log(std::uint64_t seed, std::size_t n_agents, std::size_t n_events, Timestamp t0,
                                  Timestamp span, Timestamp grain = 1, double multi_prob = 0.1) {
  tnsim::Rng rng(seed);
  std::vector<tnsim::Event> events;
  for (std::size_t k = 0; k < n_events; ++k) {
    tnsim::Event e;
    e.id = k + 1;
    e.sender = static_cast<tnsim::AgentIndex>(rng.below(n_agents));
    const std::size_t nr = rng.uniform() < multi_prob && n_agents > 2 ? 2 : 1;
    while (e.recipients.size() < nr) {
      const auto r = static_cast<tnsim::AgentIndex>(rng.below(n_agents));
      if (r != e.sender && std::find(e.recipients.begin(), e.recipients.end(), r) == e.recipients.end()) {
        e.recipients.push_back(r);
      }
    }
    const auto off = static_cast<Timestamp>(rng.below(static_cast<std::uint64_t>(span)));
    e.timestamp = t0 + off - off % grain;
    e.thread = static_cast<std::int64_t>(e.id);
    events.push_back(std::move(e));
  }
  return tnsim::EventLog(tnsim::AgentRegistry::from_labels(agent_names(n_agents)), std::move(events));
}

}  // namespace oracle
