#include "tnsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "tnsim/errors.hpp"
#include "tnsim/graph.hpp"

namespace tnsim::sim {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

EmpiricalHoD EmpiricalHoD::from_history(const EventLog& history, Timestamp t0, Timestamp t1) {
  EmpiricalHoD p;
  p.histograms.assign(history.registry().index_bound(), {});
  std::vector<double> totals(p.histograms.size(), 0.0);
  for (const Event& e : history) {
    if (e.timestamp < t0 || e.timestamp >= t1) continue;
    p.histograms[e.sender][static_cast<std::size_t>(hour_of_day(e.timestamp))] += 1;
    totals[e.sender] += 1;
  }
  for (std::size_t a = 0; a < p.histograms.size(); ++a) {
    for (double& x : p.histograms[a]) x = totals[a] > 0 ? x / totals[a] : 1.0 / 24;
  }
  return p;
}

std::string policy_name(const ActivationPolicy& policy) {
  return std::visit(overloaded{[](const Periodic&) { return std::string("periodic"); },
                               [](const LLMPredicted&) { return std::string("llm-predicted"); },
                               [](const EmpiricalHoD&) { return std::string("hod"); },
                               [](const HawkesGuided&) { return std::string("hawkes"); }},
                    policy);
}

void validate(const ActivationPolicy& policy) {
  std::visit(overloaded{[](const Periodic& p) {
                          if (!(p.interval_hours > 0)) throw InputError("periodic interval must be positive");
                        },
                        [](const LLMPredicted&) {},
                        [](const EmpiricalHoD& p) {
                          for (const auto& h : p.histograms) {
                            double sum = 0;
                            for (double x : h) {
                              if (!(x >= 0)) throw InputError("hod histogram has a negative bin");
                              sum += x;
                            }
                            if (std::abs(sum - 1) > 1e-9) throw InputError("hod histogram is not normalized");
                          }
                        },
                        [](const HawkesGuided& p) {
                          if (!p.model) throw InputError("hawkes policy needs a model");
                          p.model->validate();
                        }},
             policy);
}

namespace {

std::optional<Timestamp> within(Timestamp t, Timestamp horizon) {
  if (t > horizon) return std::nullopt;
  return t;
}

}  // namespace

std::optional<Timestamp> next_activation(const ActivationPolicy& policy, AgentIndex agent,
                                         const ActivationState& state, Timestamp t_now,
                                         Timestamp horizon, Rng& rng) {
  if (t_now >= horizon) return std::nullopt;
  return std::visit(
      overloaded{
          [&](const Periodic& p) -> std::optional<Timestamp> {
            const auto step = std::max<Timestamp>(1, std::llround(p.interval_hours * kSecondsPerHour));
            return within(t_now + step, horizon);
          },
          [&](const LLMPredicted&) -> std::optional<Timestamp> {
            if (!state.decided_next_check) return std::nullopt;
            const Timestamp t = *state.decided_next_check;
            return within(t > t_now ? t : t_now + agents::kClampSeconds, horizon);
          },
          [&](const EmpiricalHoD& p) -> std::optional<Timestamp> {
            const double u = rng.uniform();
            int hour = 23;
            if (agent < p.histograms.size()) {
              double cdf = 0;
              for (int h = 0; h < 24; ++h) {
                cdf += p.histograms[agent][static_cast<std::size_t>(h)];
                if (u < cdf) {
                  hour = h;
                  break;
                }
              }
            } else {
              hour = static_cast<int>(u * 24);
            }
            const auto offset = static_cast<Timestamp>(rng.below(kSecondsPerHour));
            Timestamp t = day_start(t_now) + hour * kSecondsPerHour + offset;
            if (t <= t_now) t += kSecondsPerDay;
            return within(t, horizon);
          },
          [&](const HawkesGuided& p) -> std::optional<Timestamp> {
            if (!state.excitation) throw InputError("hawkes activation needs an excitation state");
            return hawkes::sample_next_activation(*p.model, agent, *state.excitation, t_now, horizon, rng);
          }},
      policy);
}

bool TriggerPlan::is_trigger(AgentIndex agent) const {
  return std::binary_search(trigger_agents.begin(), trigger_agents.end(), agent);
}

TriggerPlan select_triggers(const EventLog& log, Timestamp history_t0, Timestamp history_t1, double ratio,
                            Timestamp sim_t0, Timestamp sim_t1) {
  if (!(ratio >= 0 && ratio <= 1)) throw InputError("trigger ratio must lie in [0, 1]");
  const EventLog hist = window(log, history_t0, history_t1);
  if (hist.empty()) throw InputError("history window holds no events");

  const AgentRegistry& reg = log.registry();
  std::vector<std::size_t> degree(reg.index_bound(), 0);
  const Digraph g(expand_edges(hist));
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    degree[g.nodes()[v]] = g.out(static_cast<int>(v)).size() + g.in(static_cast<int>(v)).size();
  }
  std::vector<AgentIndex> ranked;
  for (const AgentId& a : reg.agents()) ranked.push_back(a.index);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](AgentIndex a, AgentIndex b) { return degree[a] > degree[b]; });
  // The epsilon keeps ratio * D from rounding up past an exact integer.
  const auto k = std::min<std::size_t>(
      ranked.size(), static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(reg.size()) - 1e-9)));

  TriggerPlan plan;
  plan.trigger_agents.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(plan.trigger_agents.begin(), plan.trigger_agents.end());
  std::vector<Event> scheduled;
  for (const Event& e : log) {
    if (e.timestamp < sim_t0 || e.timestamp >= sim_t1 || !plan.is_trigger(e.sender)) continue;
    scheduled.push_back(e);
    scheduled.back().kind = EventKind::trigger;
  }
  plan.scheduled_events = with_events(log, std::move(scheduled));
  return plan;
}

void SimConfig::validate() const {
  if (start >= end) throw InputError("simulation window is empty");
  if (history_days <= 0) throw InputError("history_days must be positive");
  if (!(trigger_ratio >= 0 && trigger_ratio <= 1)) throw InputError("trigger_ratio must lie in [0, 1]");
  if (max_actions_per_wake < 0) throw InputError("max_actions_per_wake must be >= 0");
  sim::validate(policy);
}

// ---------------------------------------------------------------------------
// State

SimulationState::SimulationState(const SimConfig& config, const EventLog& history)
    : registry_(&history.registry()) {
  const std::size_t n = registry_->index_bound();
  real_sent_.resize(n);
  real_received_.resize(n);
  sim_sent_.resize(n);
  sim_received_.resize(n);
  read_cursor_.assign(n, 0);
  checks_.resize(n);
  cadence_.assign(n, std::vector<int>(static_cast<std::size_t>(config.history_days), 0));
  const Timestamp h0 = config.history_start();
  for (const Event& e : history) {
    if (e.timestamp < h0 || e.timestamp >= config.start) continue;
    real_sent_[e.sender].push_back(e);
    ++cadence_[e.sender][static_cast<std::size_t>((e.timestamp - h0) / kSecondsPerDay)];
    for (AgentIndex r : e.recipients) {
      if (r != e.sender) real_received_[r].push_back(e);
    }
  }
}

void SimulationState::deliver(const Event& e) {
  sim_sent_[e.sender].push_back(e);
  for (AgentIndex r : e.recipients) {
    if (r != e.sender) sim_received_[r].push_back(e);
  }
}

void SimulationState::mark_woken(AgentIndex agent, Timestamp t) {
  read_cursor_[agent] = sim_received_[agent].size();
  checks_[agent].push_back(t);
}

std::span<const Event> SimulationState::unread(AgentIndex a) const {
  return std::span<const Event>(sim_received_[a]).subspan(read_cursor_[a]);
}

agents::AgentContext build_context(AgentIndex agent, const SimulationState& state, const SimConfig& config,
                                   Timestamp t_now, std::optional<Timestamp> suggested_next) {
  agents::AgentContext ctx;
  ctx.agent = agent;
  ctx.address = state.registry().name(agent);
  if (auto it = config.personas.find(agent); it != config.personas.end()) ctx.persona = it->second;
  ctx.registry = &state.registry();
  ctx.sim_start = config.start;
  ctx.now = t_now;
  if (!state.checks(agent).empty()) ctx.last_wake = state.checks(agent).back();
  ctx.suggested_next_check = suggested_next;
  ctx.real_sent = state.real_sent(agent);
  ctx.real_received = state.real_received(agent);
  ctx.sim_sent = state.sim_sent(agent);
  ctx.sim_received = state.sim_received(agent);
  ctx.unread = state.unread(agent);
  ctx.check_history = state.checks(agent);
  ctx.cadence = state.cadence(agent);
  return ctx;
}

// ---------------------------------------------------------------------------
// Run

SimResult run(const SimConfig& config, const EventLog& history, agents::AgentPolicy& policy,
              const TriggerPlan& triggers) {
  config.validate();
  const AgentRegistry& reg = history.registry();
  const std::size_t n = reg.index_bound();
  const Timestamp horizon = config.end - 1;

  const auto* hawkes_policy = std::get_if<HawkesGuided>(&config.policy);
  const bool decided_wakes =
      std::holds_alternative<LLMPredicted>(config.policy) || (hawkes_policy && hawkes_policy->llm_override);
  std::optional<hawkes::ExcitationState> excitation;
  if (hawkes_policy) {
    if (hawkes_policy->model->dimension() < static_cast<Eigen::Index>(n)) {
      throw InputError("hawkes model has fewer agents than the corpus");
    }
    excitation.emplace(*hawkes_policy->model, config.history_start());
    excitation->replay(window(history, config.history_start(), config.start), config.start);
  }

  std::uint64_t next_id = 0;
  for (const Event& e : history) next_id = std::max(next_id, e.id + 1);
  for (const Event& e : triggers.scheduled_events) next_id = std::max(next_id, e.id + 1);

  SimulationState state(config, history);
  SimResult result;
  std::vector<Event> out;
  std::vector<Rng> rngs;
  rngs.reserve(n);
  for (std::size_t a = 0; a < n; ++a) rngs.emplace_back(stream_key(config.seed, "activation", a));

  std::set<std::pair<Timestamp, AgentIndex>> wakes;
  std::vector<std::optional<Timestamp>> pending(n);
  auto schedule = [&](AgentIndex a, std::optional<Timestamp> t) {
    if (pending[a]) wakes.erase({*pending[a], a});
    pending[a] = t;
    if (t) wakes.emplace(*t, a);
  };
  // With cross-excitation an event raises other agents' intensities, so
  // their thinning restarts from the event time. Wakes due now are kept.
  const bool cross_excitation = hawkes_policy && !hawkes_policy->llm_override && !hawkes_policy->model->diagonal_only;
  auto resample_dependents = [&](AgentIndex sender, Timestamp t) {
    if (!cross_excitation) return;
    excitation->advance_to(t);
    for (const AgentId& id : reg.agents()) {
      const AgentIndex b = id.index;
      if (b == sender || triggers.is_trigger(b) || (pending[b] && *pending[b] <= t)) continue;
      if (hawkes_policy->model->alpha(b, sender) <= 0) continue;
      schedule(b, next_activation(config.policy, b, {&*excitation, std::nullopt}, t, horizon, rngs[b]));
    }
  };
  for (const AgentId& id : reg.agents()) {
    const AgentIndex a = id.index;
    if (triggers.is_trigger(a)) continue;
    std::optional<Timestamp> first;
    if (std::holds_alternative<Periodic>(config.policy) || std::holds_alternative<LLMPredicted>(config.policy)) {
      first = config.start;
    } else {
      ActivationState as;
      if (excitation) {
        excitation->advance_to(config.start - 1);
        as.excitation = &*excitation;
      }
      first = next_activation(config.policy, a, as, config.start - 1, horizon, rngs[a]);
    }
    schedule(a, first);
  }

  const auto scheduled = triggers.scheduled_events.events();
  std::size_t next_trigger = 0;
  constexpr Timestamp kNever = std::numeric_limits<Timestamp>::max();

  while (true) {
    const Timestamp tt = next_trigger < scheduled.size() ? scheduled[next_trigger].timestamp : kNever;
    const Timestamp tw = wakes.empty() ? kNever : wakes.begin()->first;
    if (tt == kNever && tw == kNever) break;

    if (tt <= tw) {
      const Event& e = scheduled[next_trigger++];
      if (e.timestamp < config.start || e.timestamp >= config.end) continue;
      out.push_back(e);
      state.deliver(e);
      if (excitation) excitation->record(e.sender, e.timestamp);
      resample_dependents(e.sender, e.timestamp);
      ++result.counters.trigger_events;
      continue;
    }

    const auto [t, a] = *wakes.begin();
    wakes.erase(wakes.begin());
    pending[a].reset();
    ++result.counters.wakes;

    std::optional<Timestamp> suggested;
    if (hawkes_policy && hawkes_policy->llm_override) {
      excitation->advance_to(t);
      suggested = next_activation(config.policy, a, {&*excitation, std::nullopt}, t, horizon, rngs[a]);
    }
    agents::ActionDecision decision;
    try {
      decision = policy.decide(build_context(a, state, config, t, suggested));
    } catch (const std::exception& ex) {
      result.error = "agent " + reg.name(a) + " at " + format_time(t) + ": " + ex.what();
      break;
    }
    ++result.counters.decisions;

    const std::size_t sent_before = result.counters.organic_events;
    const auto cap = static_cast<std::size_t>(config.max_actions_per_wake);
    if (decision.actions.size() > cap) result.counters.truncated_actions += decision.actions.size() - cap;
    for (std::size_t k = 0; k < std::min(cap, decision.actions.size()); ++k) {
      const agents::Action& act = decision.actions[k];
      Event e;
      for (AgentIndex r : act.recipients) {
        const bool dup = std::find(e.recipients.begin(), e.recipients.end(), r) != e.recipients.end();
        if (r == a || !reg.contains(r) || dup) {
          ++result.counters.dropped_recipients;
        } else {
          e.recipients.push_back(r);
        }
      }
      if (e.recipients.empty()) {
        ++result.counters.dropped_actions;
        continue;
      }
      e.id = next_id++;
      e.sender = a;
      e.timestamp = t;
      e.kind = EventKind::organic;
      e.thread = act.type == agents::ActionType::reply && act.thread ? *act.thread
                                                                      : static_cast<std::int64_t>(e.id);
      e.body = act.body;
      out.push_back(e);
      state.deliver(e);
      if (excitation) excitation->record(a, t);
      ++result.counters.organic_events;
    }
    state.mark_woken(a, t);
    if (result.counters.organic_events > sent_before) resample_dependents(a, t);

    ActivationState as;
    if (decided_wakes) {
      if (decision.next_check_clamped || decision.next_check <= t) ++result.counters.clamped_next_checks;
      as.decided_next_check = decision.next_check;
      schedule(a, next_activation(LLMPredicted{}, a, as, t, horizon, rngs[a]));
      continue;
    }
    if (excitation) {
      excitation->advance_to(t);
      as.excitation = &*excitation;
    }
    schedule(a, next_activation(config.policy, a, as, t, horizon, rngs[a]));
  }

  result.log = EventLog(reg, std::move(out));
  return result;
}

}  // namespace tnsim::sim
