#include "tnsim/agents.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tnsim/rng.hpp"

namespace tnsim::agents {

StubParams calibrate_stub(const EventLog& history, Timestamp t0, Timestamp t1, std::uint64_t seed,
                          Timestamp reply_window) {
  const EventLog hist = window(history, t0, t1);
  const std::size_t n = history.registry().index_bound();
  StubParams p;
  p.seed = seed;
  p.reply_prob.assign(n, 0.0);
  p.initiate_rate.assign(n, 0.0);
  p.contacts = hawkes::ContactTable::from_log(hist);

  // Sent timestamps per (sender, recipient) pair, sorted.
  std::map<std::pair<AgentIndex, AgentIndex>, std::vector<Timestamp>> sent_to;
  for (const Event& e : hist) {
    for (AgentIndex r : e.recipients) {
      if (r != e.sender) sent_to[{e.sender, r}].push_back(e.timestamp);
    }
  }
  auto wrote_back = [&](AgentIndex from, AgentIndex to, Timestamp after) {
    auto it = sent_to.find({from, to});
    if (it == sent_to.end()) return false;
    auto pos = std::upper_bound(it->second.begin(), it->second.end(), after);
    return pos != it->second.end() && *pos <= after + reply_window;
  };

  std::vector<double> received(n, 0.0), answered(n, 0.0), sent(n, 0.0), replies(n, 0.0);
  for (const Event& e : hist) {
    sent[e.sender] += 1;
    // A send that answers some earlier message from one of its recipients.
    bool is_reply = false;
    for (AgentIndex r : e.recipients) {
      if (r == e.sender) continue;
      received[r] += 1;
      if (wrote_back(r, e.sender, e.timestamp)) answered[r] += 1;
      auto it = sent_to.find({r, e.sender});
      if (it != sent_to.end()) {
        auto pos = std::lower_bound(it->second.begin(), it->second.end(), e.timestamp);
        if (pos != it->second.begin() && e.timestamp - *std::prev(pos) <= reply_window) is_reply = true;
      }
    }
    if (is_reply) replies[e.sender] += 1;
  }
  const double days = std::max(1.0, static_cast<double>(t1 - t0) / static_cast<double>(kSecondsPerDay));
  for (std::size_t a = 0; a < n; ++a) {
    p.reply_prob[a] = received[a] > 0 ? std::min(1.0, answered[a] / received[a]) : 0.0;
    p.initiate_rate[a] = (sent[a] - replies[a]) / days;
  }
  return p;
}

namespace {

// Poisson draw by inversion; means here are a handful of events at most.
int poisson(double mean, Rng& rng) {
  if (!(mean > 0)) return 0;
  const double u = rng.uniform();
  double term = std::exp(-mean);
  double cdf = term;
  int k = 0;
  while (u >= cdf && k < 1000) {
    ++k;
    term *= mean / k;
    cdf += term;
  }
  return k;
}

}  // namespace

ActionDecision stub_decide(const StubParams& params, const AgentContext& ctx) {
  ActionDecision d;
  const AgentIndex self = ctx.agent;
  const double reply_prob = self < params.reply_prob.size() ? params.reply_prob[self] : 0.0;
  const double rate = self < params.initiate_rate.size() ? params.initiate_rate[self] : 0.0;

  for (const Event& m : ctx.unread) {
    if (m.sender == self) continue;
    const double u = unit_from_bits(stream_key(params.seed, "stub-reply", self, m.id));
    if (u < reply_prob) {
      Action a;
      a.type = ActionType::reply;
      a.recipients = {m.sender};
      a.thread = m.thread ? *m.thread : static_cast<std::int64_t>(m.id);
      a.body = "[stub reply to message " + std::to_string(m.id) + "]";
      d.actions.push_back(std::move(a));
    }
  }

  const Timestamp since = ctx.last_wake.value_or(ctx.sim_start);
  const double elapsed_days = static_cast<double>(std::max<Timestamp>(0, ctx.now - since)) /
                              static_cast<double>(kSecondsPerDay);
  if (rate > 0 && elapsed_days > 0 && params.contacts.has_contacts(self)) {
    Rng rng(stream_key(params.seed, "stub-initiate", self, static_cast<std::uint64_t>(ctx.now)));
    const int n = poisson(rate * elapsed_days, rng);
    for (int k = 0; k < n; ++k) {
      Action a;
      a.type = ActionType::initiate;
      a.recipients = {params.contacts.draw(self, rng)};
      a.body = "[stub message " + std::to_string(k) + "]";
      d.actions.push_back(std::move(a));
    }
  }

  d.next_check = ctx.suggested_next_check.value_or(ctx.now + 3 * kSecondsPerHour);
  d.reasoning = "stub";
  return d;
}

}  // namespace tnsim::agents
