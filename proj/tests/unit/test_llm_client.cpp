#include <atomic>
#include <cstdlib>
#include <deque>
#include <mutex>
#include <thread>

// The project headers come first: <resolv.h>, pulled in by httplib, defines
// a _res macro that breaks Eigen headers included after it.
#include "tnsim/errors.hpp"
#include "tnsim/llm_client.hpp"

#include <httplib.h>
#include <json.hpp>

#include "doctest.h"

using namespace tnsim;
using namespace tnsim::agents;

namespace {

constexpr Timestamp kMonday = 1003708800;

struct Fixture {
  AgentRegistry reg = AgentRegistry::from_labels({"alice", "bob", "carol"});
  std::vector<Event> received;
  AgentContext ctx;

  Fixture() {
    Event e;
    e.id = 5;
    e.sender = 0;
    e.recipients = {1};
    e.timestamp = kMonday - 100;
    e.thread = 5;
    e.body = "lunch?";
    received.push_back(e);
    e.id = 6;
    e.timestamp = kMonday + kSecondsPerDay;  // in the future of ctx.now
    e.body = "from the future";
    received.push_back(e);
    ctx.agent = 1;
    ctx.address = "bob";
    ctx.registry = &reg;
    ctx.sim_start = kMonday - kSecondsPerDay;
    ctx.now = kMonday;
    ctx.real_received = received;
    ctx.cadence = {1, 0, 2};
  }
};

LLMEndpointConfig endpoint(int port) {
  LLMEndpointConfig c;
  c.base_url = "http://127.0.0.1:" + std::to_string(port);
  c.model_name = "test-model";
  c.api_key_env = "TNSIM_TEST_KEY";
  c.timeout_seconds = 5;
  c.max_retries = 2;
  c.backoff_initial_seconds = 0.01;
  return c;
}

std::string completion(const std::string& content) {
  nlohmann::json j;
  j["choices"] = nlohmann::json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}});
  return j.dump();
}

/// Local chat-completion server answering from a script of (status, body).
class MockServer {
 public:
  MockServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu_);
      requests.push_back(req.body);
      auth.push_back(req.get_header_value("Authorization"));
      auto [status, body] = script.empty() ? std::pair{500, std::string("empty script")} : script.front();
      if (!script.empty()) script.pop_front();
      res.status = status;
      res.set_content(body, "application/json");
    });
    port = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }

  int port = 0;
  std::deque<std::pair<int, std::string>> script;
  std::vector<std::string> requests;
  std::vector<std::string> auth;

 private:
  httplib::Server server_;
  std::thread thread_;
  std::mutex mu_;
};

}  // namespace

TEST_CASE("prompt rendering fills every placeholder and hides future events") {
  Fixture f;
  LLMEndpointConfig cfg;
  cfg.organization_context = "A trading company.";
  const auto msgs = render_prompt(PromptTemplate::standard(), f.ctx, cfg);
  REQUIRE(msgs.size() == 2);
  CHECK(msgs[0].role == "system");
  for (const auto& m : msgs) {
    CHECK(m.content.find("{email_address}") == std::string::npos);
    CHECK(m.content.find("{current_time}") == std::string::npos);
    CHECK(m.content.find("from the future") == std::string::npos);
  }
  CHECK(msgs[0].content.find("bob") != std::string::npos);
  CHECK(msgs[0].content.find("A trading company.") != std::string::npos);
  CHECK(msgs[1].content.find("lunch?") != std::string::npos);
  CHECK(msgs[1].content.find("2001-10-22 00:00:00 UTC") != std::string::npos);
}

TEST_CASE("history sections are truncated to the newest items") {
  Fixture f;
  LLMEndpointConfig cfg;
  cfg.max_history_items = 1;
  std::vector<Event> many;
  for (int k = 0; k < 4; ++k) {
    Event e;
    e.id = static_cast<std::uint64_t>(k + 1);
    e.sender = 0;
    e.recipients = {1};
    e.timestamp = kMonday - 1000 + k;
    e.body = "note " + std::to_string(k);
    many.push_back(e);
  }
  f.ctx.real_received = many;
  const auto user = render_prompt(PromptTemplate::standard(), f.ctx, cfg)[1].content;
  CHECK(user.find("note 3") != std::string::npos);
  CHECK(user.find("note 2") == std::string::npos);
  CHECK(user.find("3 older messages omitted") != std::string::npos);
}

TEST_CASE("request body") {
  LLMEndpointConfig cfg;
  cfg.model_name = "m";
  cfg.temperature = 0.5;
  const auto j = nlohmann::json::parse(build_request_body(cfg, {{"system", "s"}, {"user", "u"}}));
  CHECK(j["model"] == "m");
  CHECK(j["messages"].size() == 2);
  CHECK(j["messages"][1]["content"] == "u");
  CHECK(j["temperature"] == 0.5);
  CHECK(j["seed"] == 42);
}

TEST_CASE("reply content extraction") {
  CHECK(extract_reply_content(completion("hi")) == "hi");
  CHECK(extract_reply_content(R"({"message": {"content": "x"}})") == "x");
  CHECK(extract_reply_content(R"({"content": "y"})") == "y");
  CHECK_THROWS_AS(extract_reply_content("not json"), DecisionParseError);
  CHECK_THROWS_AS(extract_reply_content(R"({"choices": []})"), DecisionParseError);
}

TEST_CASE("decision parsing") {
  Fixture f;
  const auto d = parse_decision(
      R"(Sure. {"actions": [
           {"type": "reply", "recipients": ["alice", "bob", "alice", "zed"], "thread": "5", "body": "yes"},
           {"type": "none"},
           {"type": "initiate", "recipients": ["bob"], "body": "dropped"},
           {"type": "Initiate", "recipients": "carol", "body": "new"}],
         "next_check": "2001-10-22 09:00:00", "reasoning": "r"} trailing)",
      f.ctx);
  REQUIRE(d.actions.size() == 2);
  CHECK(d.actions[0].type == ActionType::reply);
  CHECK(d.actions[0].recipients == std::vector<AgentIndex>{0});
  CHECK(d.actions[0].thread == 5);
  CHECK(d.actions[1].type == ActionType::initiate);
  CHECK(d.actions[1].recipients == std::vector<AgentIndex>{2});
  CHECK(d.next_check == kMonday + 9 * kSecondsPerHour);
  CHECK_FALSE(d.next_check_clamped);
  CHECK(d.reasoning == "r");

  const auto past = parse_decision(R"({"actions": [], "next_check": 5})", f.ctx);
  CHECK(past.next_check == kMonday + kClampSeconds);
  CHECK(past.next_check_clamped);

  CHECK_THROWS_AS(parse_decision("no json here", f.ctx), DecisionParseError);
  CHECK_THROWS_AS(parse_decision(R"({"actions": []})", f.ctx), DecisionParseError);
  CHECK_THROWS_AS(parse_decision(R"({"actions": [{"type": "forward"}], "next_check": 1})", f.ctx),
                  DecisionParseError);
  CHECK_THROWS_AS(parse_decision(R"({"next_check": "tomorrow"})", f.ctx), DecisionParseError);
}

TEST_CASE("endpoint validation") {
  LLMEndpointConfig c;
  CHECK_THROWS_AS(c.validate(), InputError);
  c.base_url = "http://x";
  CHECK_THROWS_AS(c.validate(), InputError);
  c.model_name = "m";
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("http round trip with retries, bearer key from the environment") {
  ::setenv("TNSIM_TEST_KEY", "sk-test", 1);
  MockServer srv;
  srv.script = {{503, "busy"}, {429, "slow down"}, {200, completion(R"({"next_check": "2001-10-23"})")}};
  const auto cfg = endpoint(srv.port);
  Fixture f;
  LlmPolicy policy(cfg, PromptTemplate::standard(), make_http_transport(cfg));
  const auto d = policy.decide(f.ctx);
  CHECK(d.next_check == kMonday + kSecondsPerDay);
  CHECK(policy.counters().calls == 3);
  CHECK(policy.counters().retries == 2);
  REQUIRE(srv.auth.size() == 3);
  CHECK(srv.auth[0] == "Bearer sk-test");
  const auto body = nlohmann::json::parse(srv.requests[0]);
  CHECK(body["model"] == "test-model");
  CHECK(srv.requests[0].find("sk-test") == std::string::npos);
  ::unsetenv("TNSIM_TEST_KEY");
}

TEST_CASE("client errors are not retried and exhausted retries throw") {
  MockServer srv;
  const auto cfg = endpoint(srv.port);
  Fixture f;
  auto transport = make_http_transport(cfg);
  LlmCounters counters;
  srv.script = {{400, "bad request"}};
  CHECK_THROWS_AS(llm_decide(cfg, PromptTemplate::standard(), f.ctx, *transport, &counters), LlmError);
  CHECK(counters.calls == 1);

  srv.script = {{500, ""}, {500, ""}, {500, ""}};
  CHECK_THROWS_AS(llm_decide(cfg, PromptTemplate::standard(), f.ctx, *transport, &counters), LlmError);
  CHECK(counters.calls == 4);
  CHECK(counters.retries == 2);
}

TEST_CASE("an unparseable reply gets one repair prompt") {
  MockServer srv;
  const auto cfg = endpoint(srv.port);
  Fixture f;
  auto transport = make_http_transport(cfg);
  LlmCounters counters;
  srv.script = {{200, completion("I think I will wait.")}, {200, completion(R"({"next_check": 1})")}};
  const auto d = llm_decide(cfg, PromptTemplate::standard(), f.ctx, *transport, &counters);
  CHECK(d.next_check_clamped);
  CHECK(counters.repairs == 1);
  CHECK(counters.clamps == 1);
  const auto second = nlohmann::json::parse(srv.requests.at(1));
  REQUIRE(second["messages"].size() == 4);
  CHECK(second["messages"][2]["role"] == "assistant");
  CHECK(second["messages"][2]["content"] == "I think I will wait.");

  srv.script = {{200, completion("nope")}, {200, completion("still nope")}};
  CHECK_THROWS_AS(llm_decide(cfg, PromptTemplate::standard(), f.ctx, *transport, &counters), DecisionParseError);
}

TEST_CASE("connection failure surfaces as LlmError") {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  auto cfg = endpoint(port);
  cfg.max_retries = 1;
  Fixture f;
  auto transport = make_http_transport(cfg);
  CHECK_THROWS_AS(llm_decide(cfg, PromptTemplate::standard(), f.ctx, *transport), LlmError);
}
