#include <fstream>
#include <functional>
#include <set>

#include <json.hpp>

#include "doctest.h"
#include "oracles.hpp"
#include "tnsim/errors.hpp"
#include "tnsim/simulator.hpp"

using namespace tnsim;
using namespace tnsim::sim;

namespace {

constexpr Timestamp kMonday = 1003708800;
const std::filesystem::path kFixtures = TNSIM_FIXTURES;

EventLog mini() { return ingest(kFixtures / "mini_corpus.jsonl", LogFormat::jsonl); }

SimConfig mini_config() {
  SimConfig c;
  c.start = kMonday;
  c.end = kMonday + 8 * kSecondsPerDay;
  return c;
}

/// Policy driven by a callback; records every context it sees.
class Scripted final : public agents::AgentPolicy {
 public:
  using Fn = std::function<agents::ActionDecision(const agents::AgentContext&)>;
  explicit Scripted(Fn fn) : fn_(std::move(fn)) {}
  agents::ActionDecision decide(const agents::AgentContext& ctx) override {
    seen.push_back({ctx.agent, ctx.now, ctx.unread.size(), ctx.last_wake});
    for (const Event& e : ctx.unread) CHECK(e.timestamp <= ctx.now);
    for (const Event& e : ctx.sim_received) CHECK(e.timestamp <= ctx.now);
    return fn_(ctx);
  }
  std::string name() const override { return "scripted"; }

  struct Seen {
    AgentIndex agent;
    Timestamp now;
    std::size_t unread;
    std::optional<Timestamp> last_wake;
  };
  std::vector<Seen> seen;

 private:
  Fn fn_;
};

agents::ActionDecision idle(const agents::AgentContext& ctx) {
  agents::ActionDecision d;
  d.next_check = ctx.now + kSecondsPerDay;
  return d;
}

}  // namespace

TEST_CASE("trigger selection follows history degree") {
  const auto log = mini();
  std::ifstream in(kFixtures / "mini_corpus_counts.json");
  const auto counts = nlohmann::json::parse(in);
  const auto cfg = mini_config();
  for (const char* key : {"triggers_ratio_0.1", "triggers_ratio_0.2"}) {
    const double ratio = std::string(key) == "triggers_ratio_0.1" ? 0.1 : 0.2;
    const auto plan = select_triggers(log, cfg.history_start(), cfg.start, ratio, cfg.start, cfg.end);
    std::vector<std::string> names;
    for (AgentIndex a : plan.trigger_agents) names.push_back(log.registry().name(a));
    CHECK(names == counts[key].get<std::vector<std::string>>());
    for (const Event& e : plan.scheduled_events) {
      CHECK(plan.is_trigger(e.sender));
      CHECK(e.kind == EventKind::trigger);
      CHECK(e.timestamp >= cfg.start);
      CHECK(e.timestamp < cfg.end);
    }
  }
  const auto none = select_triggers(log, cfg.history_start(), cfg.start, 0.0, cfg.start, cfg.end);
  CHECK(none.trigger_agents.empty());
  CHECK(none.scheduled_events.empty());
  CHECK_THROWS_AS(select_triggers(log, 0, 10, 0.1, cfg.start, cfg.end), InputError);
  CHECK_THROWS_AS(select_triggers(log, cfg.history_start(), cfg.start, 1.5, cfg.start, cfg.end), InputError);
}

TEST_CASE("activation policies") {
  Rng rng(1);
  ActivationState st;
  CHECK(next_activation(Periodic{2}, 0, st, kMonday, kMonday + kSecondsPerDay, rng) == kMonday + 7200);
  CHECK_FALSE(next_activation(Periodic{2}, 0, st, kMonday, kMonday + 3600, rng));

  st.decided_next_check = kMonday - 5;
  CHECK(next_activation(LLMPredicted{}, 0, st, kMonday, kMonday + kSecondsPerDay, rng) ==
        kMonday + agents::kClampSeconds);
  st.decided_next_check = kMonday + 999;
  CHECK(next_activation(LLMPredicted{}, 0, st, kMonday, kMonday + kSecondsPerDay, rng) == kMonday + 999);

  EmpiricalHoD hod;
  hod.histograms.resize(1);
  hod.histograms[0][14] = 1.0;
  for (int k = 0; k < 50; ++k) {
    const Timestamp now = kMonday + static_cast<Timestamp>(rng.below(kSecondsPerWeek));
    const auto t = next_activation(hod, 0, {}, now, now + 2 * kSecondsPerDay, rng);
    REQUIRE(t);
    CHECK(hour_of_day(*t) == 14);
    CHECK(*t > now);
    CHECK(*t - now <= kSecondsPerDay + kSecondsPerHour);
  }
  CHECK_THROWS_AS(validate(Periodic{0}), InputError);
  CHECK_THROWS_AS(validate(HawkesGuided{}), InputError);
}

TEST_CASE("hod histograms fall back to uniform") {
  const auto log = mini();
  const auto h = EmpiricalHoD::from_history(log, 0, kMonday);
  REQUIRE(h.histograms.size() == log.registry().index_bound());
  for (const auto& row : h.histograms) {
    double s = 0;
    for (double x : row) s += x;
    CHECK(s == doctest::Approx(1.0));
  }
  const auto empty = EmpiricalHoD::from_history(log, 0, 1);
  CHECK(empty.histograms[0][5] == doctest::Approx(1.0 / 24));
}

TEST_CASE("periodic wakes, delivery and id assignment") {
  const auto log = mini();
  auto cfg = mini_config();
  cfg.end = cfg.start + kSecondsPerDay;
  cfg.trigger_ratio = 0;
  const auto plan = select_triggers(log, cfg.history_start(), cfg.start, 0.0, cfg.start, cfg.end);
  const AgentIndex alice = *log.registry().find("alice"), bob = *log.registry().find("bob");
  Scripted policy([&](const agents::AgentContext& ctx) {
    auto d = idle(ctx);
    if (ctx.agent == alice && ctx.now == cfg.start) {
      agents::Action a;
      a.recipients = {bob, bob, alice, 999};
      d.actions.push_back(a);
    }
    if (ctx.agent == bob) {
      for (const Event& e : ctx.unread) {
        agents::Action r;
        r.type = agents::ActionType::reply;
        r.recipients = {e.sender};
        r.thread = e.thread;
        d.actions.push_back(r);
      }
    }
    return d;
  });
  const auto r = run(cfg, log, policy, plan);
  REQUIRE_FALSE(r.error);
  // Ten agents wake every three hours over one day.
  CHECK(r.counters.wakes == 10 * 8);
  CHECK(r.counters.dropped_recipients == 3);
  REQUIRE(r.log.size() == 2);
  const Event& sent = r.log[0];
  const Event& reply = r.log[1];
  CHECK(sent.sender == alice);
  CHECK(sent.recipients == std::vector<AgentIndex>{bob});
  CHECK(sent.thread == static_cast<std::int64_t>(sent.id));
  std::uint64_t max_id = 0;
  for (const Event& e : log) max_id = std::max(max_id, e.id);
  CHECK(sent.id > max_id);
  // Bob wakes after alice at the same second and already sees her message.
  CHECK(reply.timestamp == cfg.start);
  CHECK(reply.thread == sent.thread);
  CHECK(reply.recipients == std::vector<AgentIndex>{alice});
}

TEST_CASE("actions beyond the cap are truncated") {
  const auto log = mini();
  auto cfg = mini_config();
  cfg.end = cfg.start + 1;
  cfg.max_actions_per_wake = 2;
  const auto plan = select_triggers(log, cfg.history_start(), cfg.start, 0.0, cfg.start, cfg.end);
  Scripted policy([&](const agents::AgentContext& ctx) {
    auto d = idle(ctx);
    for (int k = 0; k < 4; ++k) {
      agents::Action a;
      a.recipients = {static_cast<AgentIndex>((ctx.agent + 1) % 10)};
      d.actions.push_back(a);
    }
    return d;
  });
  const auto r = run(cfg, log, policy, plan);
  CHECK(r.counters.truncated_actions == 20);
  CHECK(r.counters.organic_events == 20);
}

TEST_CASE("llm-predicted schedule clamps past next checks") {
  const auto log = mini();
  auto cfg = mini_config();
  cfg.end = cfg.start + 600;
  cfg.policy = LLMPredicted{};
  const auto plan = select_triggers(log, cfg.history_start(), cfg.start, 0.0, cfg.start, cfg.end);
  Scripted policy([](const agents::AgentContext& ctx) {
    agents::ActionDecision d;
    d.next_check = ctx.now;
    return d;
  });
  const auto r = run(cfg, log, policy, plan);
  // Wakes at 0, 60, ..., 540 seconds for each of ten agents.
  CHECK(r.counters.wakes == 100);
  CHECK(r.counters.clamped_next_checks == 100);
  for (const auto& s : policy.seen) CHECK(s.now % 60 == cfg.start % 60);
}

TEST_CASE("a failing policy aborts with a partial log") {
  const auto log = mini();
  auto cfg = mini_config();
  const auto plan = select_triggers(log, cfg.history_start(), cfg.start, 0.1, cfg.start, cfg.end);
  int calls = 0;
  Scripted policy([&](const agents::AgentContext& ctx) {
    if (++calls == 15) throw std::runtime_error("backend down");
    return idle(ctx);
  });
  const auto r = run(cfg, log, policy, plan);
  REQUIRE(r.error);
  CHECK(r.error->find("backend down") != std::string::npos);
  CHECK(r.counters.decisions == 14);
}

TEST_CASE("triggers never wake and their events appear verbatim") {
  const auto log = mini();
  const auto cfg = mini_config();
  const auto plan = select_triggers(log, cfg.history_start(), cfg.start, 0.2, cfg.start, cfg.end);
  Scripted policy(idle);
  const auto r = run(cfg, log, policy, plan);
  for (const auto& s : policy.seen) CHECK_FALSE(plan.is_trigger(s.agent));
  CHECK(r.counters.trigger_events == plan.scheduled_events.size());
  CHECK(r.log.size() == plan.scheduled_events.size());
  for (std::size_t k = 0; k < r.log.size(); ++k) CHECK(r.log[k] == plan.scheduled_events[k]);
}

TEST_CASE("hawkes-guided runs are reproducible") {
  const auto log = mini();
  auto cfg = mini_config();
  auto model = std::make_shared<hawkes::HawkesModel>(
      hawkes::HawkesModel::constant(std::vector<std::string>(), 0.0, 0.0, 1.0));
  std::vector<std::string> names;
  for (const auto& a : log.registry().agents()) names.push_back(*a.label);
  *model = hawkes::HawkesModel::constant(names, 0.2, 0.3, 1.0);
  cfg.policy = HawkesGuided{model, false};
  const auto plan = select_triggers(log, cfg.history_start(), cfg.start, 0.1, cfg.start, cfg.end);
  Scripted p1(idle), p2(idle);
  const auto a = run(cfg, log, p1, plan);
  const auto b = run(cfg, log, p2, plan);
  CHECK(a.log == b.log);
  REQUIRE(p1.seen.size() == p2.seen.size());
  CHECK(p1.seen.size() > 0);
  for (std::size_t k = 0; k < p1.seen.size(); ++k) CHECK(p1.seen[k].now == p2.seen[k].now);
}

TEST_CASE("context carries ground-truth history and cadence") {
  const auto log = mini();
  const auto cfg = mini_config();
  SimulationState state(cfg, log);
  const AgentIndex alice = *log.registry().find("alice");
  const auto ctx = build_context(alice, state, cfg, cfg.start, std::nullopt);
  CHECK(ctx.address == "alice");
  CHECK(ctx.real_sent.size() > 0);
  for (const Event& e : ctx.real_sent) CHECK(e.timestamp < cfg.start);
  CHECK(ctx.cadence.size() == static_cast<std::size_t>(cfg.history_days));
  int total = 0;
  for (int c : ctx.cadence) total += c;
  CHECK(static_cast<std::size_t>(total) == ctx.real_sent.size());
  CHECK(ctx.unread.empty());
}

TEST_CASE("config validation") {
  auto c = mini_config();
  CHECK_NOTHROW(c.validate());
  c.end = c.start;
  CHECK_THROWS_AS(c.validate(), InputError);
  c = mini_config();
  c.trigger_ratio = -0.1;
  CHECK_THROWS_AS(c.validate(), InputError);
}
