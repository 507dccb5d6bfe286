#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tnsim/corpus.hpp"
#include "tnsim/hawkes.hpp"

namespace tnsim::agents {

/// Everything an agent sees when it wakes. The spans point into simulator
/// state and are only valid for the duration of one decide() call; none of
/// them holds an event later than `now`.
struct AgentContext {
  AgentIndex agent = 0;
  std::string address;
  std::optional<std::string> persona;
  const AgentRegistry* registry = nullptr;

  Timestamp sim_start = 0;
  Timestamp now = 0;
  std::optional<Timestamp> last_wake;
  std::optional<Timestamp> suggested_next_check;

  std::span<const Event> real_sent;      // ground truth, history window
  std::span<const Event> real_received;  // ground truth, history window
  std::span<const Event> sim_sent;       // since takeover
  std::span<const Event> sim_received;   // since takeover
  std::span<const Event> unread;         // tail of sim_received since last wake
  std::span<const Timestamp> check_history;

  /// Sent-event count per UTC day of the history window, oldest first.
  std::vector<int> cadence;
};

enum class ActionType { reply, initiate };

struct Action {
  ActionType type = ActionType::initiate;
  std::vector<AgentIndex> recipients;
  std::optional<std::int64_t> thread;
  std::string body;

  friend bool operator==(const Action&, const Action&) = default;
};

/// An empty action list means the agent stays idle.
struct ActionDecision {
  std::vector<Action> actions;
  Timestamp next_check = 0;
  bool next_check_clamped = false;
  std::string reasoning;

  friend bool operator==(const ActionDecision&, const ActionDecision&) = default;
};

/// Earliest wake time accepted after a past or present next_check.
inline constexpr Timestamp kClampSeconds = 60;

class AgentPolicy {
 public:
  virtual ~AgentPolicy() = default;
  virtual ActionDecision decide(const AgentContext& ctx) = 0;
  virtual std::string name() const = 0;
};

// ---------------------------------------------------------------------------
// Statistical stub

struct StubParams {
  std::vector<double> reply_prob;     // by agent index
  std::vector<double> initiate_rate;  // initiations per day, by agent index
  hawkes::ContactTable contacts;
  std::uint64_t seed = 42;
};

/// Estimates the stub's parameters from ground truth in [t0, t1). A
/// received message counts as answered when the recipient writes back to
/// its sender within `reply_window`; unanswered sends count as initiations.
StubParams calibrate_stub(const EventLog& history, Timestamp t0, Timestamp t1, std::uint64_t seed,
                          Timestamp reply_window = kSecondsPerDay);

/// Deterministic in (params, ctx): each unread message is answered when a
/// hash of (seed, agent, event id) falls below reply_prob; the number of new
/// threads is Poisson with mean initiate_rate times the days since the last
/// wake, keyed by (seed, agent, now).
ActionDecision stub_decide(const StubParams& params, const AgentContext& ctx);

class StubPolicy final : public AgentPolicy {
 public:
  explicit StubPolicy(StubParams params) : params_(std::move(params)) {}
  ActionDecision decide(const AgentContext& ctx) override { return stub_decide(params_, ctx); }
  std::string name() const override { return "stub"; }
  const StubParams& params() const { return params_; }

 private:
  StubParams params_;
};

}  // namespace tnsim::agents
