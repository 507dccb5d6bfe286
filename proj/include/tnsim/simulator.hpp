#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tnsim/agents.hpp"
#include "tnsim/corpus.hpp"
#include "tnsim/hawkes.hpp"
#include "tnsim/rng.hpp"

namespace tnsim::sim {

// ---------------------------------------------------------------------------
// Activation policies

/// Wake every interval_hours.
struct Periodic {
  double interval_hours = 3;
};

/// Wake at the next_check of the agent's last decision.
struct LLMPredicted {};

/// Wake at an hour drawn from the agent's hour-of-day histogram of sent
/// events; agents without history get a uniform histogram.
struct EmpiricalHoD {
  std::vector<std::array<double, 24>> histograms;  // by agent index, each sums to 1

  static EmpiricalHoD from_history(const EventLog& history, Timestamp t0, Timestamp t1);
};

/// Wake by thinning the fitted process, which sees every event so far. With
/// llm_override the sampled time is only a suggestion and the decision's
/// next_check wins.
struct HawkesGuided {
  std::shared_ptr<const hawkes::HawkesModel> model;
  bool llm_override = false;
};

using ActivationPolicy = std::variant<Periodic, LLMPredicted, EmpiricalHoD, HawkesGuided>;

std::string policy_name(const ActivationPolicy& policy);
/// Throws InputError.
void validate(const ActivationPolicy& policy);

/// What next_activation may look at besides the policy itself.
struct ActivationState {
  const hawkes::ExcitationState* excitation = nullptr;  // HawkesGuided, taken at t_now
  std::optional<Timestamp> decided_next_check;          // LLMPredicted
};

/// Next wake in (t_now, horizon], or none when the agent sleeps past the
/// horizon. A decided next_check at or before t_now moves to t_now + 60 s.
std::optional<Timestamp> next_activation(const ActivationPolicy& policy, AgentIndex agent,
                                         const ActivationState& state, Timestamp t_now,
                                         Timestamp horizon, Rng& rng);

// ---------------------------------------------------------------------------
// Triggers and configuration

struct TriggerPlan {
  std::vector<AgentIndex> trigger_agents;  // ascending
  EventLog scheduled_events;

  bool is_trigger(AgentIndex agent) const;
};

/// The ceil(ratio * D) highest-degree agents of the history-window graph
/// become triggers, D being the number of registered agents. Degree is in
/// plus out degree of the simple directed graph without self-loops; ties go
/// to the lower index. Their events in [sim_t0, sim_t1) are scheduled.
/// Throws InputError if the history window holds no events.
TriggerPlan select_triggers(const EventLog& log, Timestamp history_t0, Timestamp history_t1, double ratio,
                            Timestamp sim_t0, Timestamp sim_t1);

struct SimConfig {
  Timestamp start = 0;  // simulation window [start, end)
  Timestamp end = 0;
  int history_days = 32;
  double trigger_ratio = 0.10;
  ActivationPolicy policy = Periodic{};
  std::uint64_t seed = 42;
  int max_actions_per_wake = 5;
  std::map<AgentIndex, std::string> personas;

  Timestamp history_start() const { return start - history_days * kSecondsPerDay; }
  /// Throws InputError.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Run

struct SimCounters {
  std::size_t wakes = 0;
  std::size_t decisions = 0;
  std::size_t organic_events = 0;
  std::size_t trigger_events = 0;
  std::size_t truncated_actions = 0;   // beyond max_actions_per_wake
  std::size_t dropped_recipients = 0;  // self, unknown, or duplicate
  std::size_t dropped_actions = 0;     // nothing left to send to
  std::size_t clamped_next_checks = 0;
};

/// Simulation state visible to build_context: ground truth of the history
/// window plus everything simulated so far, per agent.
class SimulationState {
 public:
  SimulationState(const SimConfig& config, const EventLog& history);

  void deliver(const Event& e);
  /// Marks every message received so far as read and records the wake.
  void mark_woken(AgentIndex agent, Timestamp t);

  const AgentRegistry& registry() const { return *registry_; }
  std::span<const Event> real_sent(AgentIndex a) const { return real_sent_[a]; }
  std::span<const Event> real_received(AgentIndex a) const { return real_received_[a]; }
  std::span<const Event> sim_sent(AgentIndex a) const { return sim_sent_[a]; }
  std::span<const Event> sim_received(AgentIndex a) const { return sim_received_[a]; }
  std::span<const Event> unread(AgentIndex a) const;
  std::span<const Timestamp> checks(AgentIndex a) const { return checks_[a]; }
  const std::vector<int>& cadence(AgentIndex a) const { return cadence_[a]; }

 private:
  const AgentRegistry* registry_;
  std::vector<std::vector<Event>> real_sent_, real_received_, sim_sent_, sim_received_;
  std::vector<std::size_t> read_cursor_;
  std::vector<std::vector<Timestamp>> checks_;
  std::vector<std::vector<int>> cadence_;
};

agents::AgentContext build_context(AgentIndex agent, const SimulationState& state, const SimConfig& config,
                                   Timestamp t_now, std::optional<Timestamp> suggested_next);

struct SimResult {
  EventLog log;  // triggers and organic events, sorted
  SimCounters counters;
  std::optional<std::string> error;  // set when a policy failure aborted the run
};

/// Chronological event queue over [start, end). Trigger injections come
/// before wakes at the same second, wakes in agent-index order. Organic
/// events are stamped at the wake time and get fresh ids above every id of
/// `history`.
SimResult run(const SimConfig& config, const EventLog& history, agents::AgentPolicy& policy,
              const TriggerPlan& triggers);

}  // namespace tnsim::sim
