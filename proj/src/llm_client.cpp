#include "tnsim/llm_client.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "tnsim/errors.hpp"

namespace tnsim::agents {

void LLMEndpointConfig::validate() const {
  if (max_retries < 0) throw InputError("llm: max_retries must be >= 0");
  if (!(timeout_seconds > 0)) throw InputError("llm: timeout_seconds must be positive");
  if (base_url.empty()) throw InputError("llm: base_url is required");
  if (model_name.empty()) throw InputError("llm: model_name is required");
}

// ---------------------------------------------------------------------------
// Prompt

namespace {

constexpr const char* kResponseSchema =
    R"({"actions": [{"type": "reply" | "initiate", "recipients": ["<address>", ...], )"
    R"("thread": <thread id or null>, "body": "<message text>"}], )"
    R"("next_check": "YYYY-MM-DD HH:MM:SS", "reasoning": "<why>"})";

constexpr const char* kSystemTemplate = R"(You manage the mailbox {email_address} on behalf of its owner.
{organization_context}
Owner persona:
{persona}

Behave the way the owner has behaved in the past: tone, formality, selectivity and how often they write. Doing nothing is a valid choice. Not every message needs an answer, and old messages that were never answered can be left alone.

Actions (zero or more per mailbox check):
- reply: answer an existing thread. Recipients must not include yourself.
- initiate: start a new thread. Recipients must not include yourself.
- none: take no action.

Pick a next_check time for your next visit to the mailbox from the owner's working hours, the difference between weekdays and weekends, and how urgent the pending messages are. A suggested time may be provided; keep it or move it. next_check must be later than the current time.

Sending cadence:
- {frequency_guidance}
- {prev_sent_pattern_info}
Stay within the owner's usual sending volume.

You have been operating this mailbox since {sim_start_date}.

Answer with one JSON object and nothing else:
{response_schema})";

constexpr const char* kUserTemplate = R"(# Mailbox
- Address: {email_address}

# Messages the owner received before takeover
{real_received_history_text}

# Messages the owner sent before takeover
{real_sent_history_text}

# Messages received since takeover
{received_emails_text}

# Messages you sent since takeover
{sent_emails_text}

# Unread messages since the last check
{incoming_emails_text}

# Mailbox checks since takeover
{check_history_info}

# Your sending since takeover
{curr_sent_pattern_info}

# Suggested next check
{scheduled_next_check_info}

# Current time: {current_time}

Decide which actions to take now and when to check the mailbox next.)";

std::string render_events(std::span<const Event> events, const AgentContext& ctx, std::size_t limit) {
  std::vector<const Event*> visible;
  for (const Event& e : events) {
    if (e.timestamp <= ctx.now) visible.push_back(&e);
  }
  if (visible.empty()) return "(none)";
  std::ostringstream out;
  const std::size_t skip = visible.size() > limit ? visible.size() - limit : 0;
  if (skip > 0) out << "(" << skip << " older messages omitted)\n";
  for (std::size_t k = skip; k < visible.size(); ++k) {
    const Event& e = *visible[k];
    out << "[" << format_time(e.timestamp) << " UTC] id=" << e.id;
    if (e.thread) out << " thread=" << *e.thread;
    out << " from " << ctx.registry->name(e.sender) << " to ";
    for (std::size_t r = 0; r < e.recipients.size(); ++r) {
      if (r) out << ", ";
      out << ctx.registry->name(e.recipients[r]);
    }
    out << ": " << (e.body ? *e.body : std::string("(no body)"));
    if (k + 1 < visible.size()) out << '\n';
  }
  return out.str();
}

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size() * 2);
  for (std::size_t k = 0; k < tmpl.size();) {
    if (tmpl[k] == '{') {
      const auto close = tmpl.find('}', k);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(tmpl.substr(k + 1, close - k - 1)));
        if (it != values.end()) {
          out += it->second;
          k = close + 1;
          continue;
        }
      }
    }
    out += tmpl[k++];
  }
  return out;
}

}  // namespace

PromptTemplate PromptTemplate::standard() { return {kSystemTemplate, kUserTemplate}; }

PromptTemplate PromptTemplate::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open prompt template " + path);
  try {
    const auto j = nlohmann::json::parse(in);
    return {j.at("system").get<std::string>(), j.at("user").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw InputError("prompt template " + path + ": " + e.what());
  }
}

std::vector<ChatMessage> render_prompt(const PromptTemplate& tmpl, const AgentContext& ctx,
                                       const LLMEndpointConfig& cfg) {
  std::map<std::string, std::string> v;
  v["email_address"] = ctx.address;
  v["organization_context"] = cfg.organization_context;
  v["persona"] = ctx.persona.value_or("(no persona provided)");
  v["sim_start_date"] = format_time(ctx.sim_start) + " UTC";
  v["current_time"] = format_time(ctx.now) + " UTC";
  v["response_schema"] = kResponseSchema;

  int history_total = 0;
  std::ostringstream per_day;
  for (std::size_t d = 0; d < ctx.cadence.size(); ++d) {
    history_total += ctx.cadence[d];
    per_day << (d ? ", " : "") << ctx.cadence[d];
  }
  const double days = std::max<std::size_t>(1, ctx.cadence.size());
  std::ostringstream guidance;
  guidance.precision(2);
  guidance << std::fixed << "The owner sent " << history_total << " messages over the last " << ctx.cadence.size()
           << " days, about " << history_total / days << " per day.";
  v["frequency_guidance"] = guidance.str();
  v["prev_sent_pattern_info"] = "Messages sent per day before takeover, oldest first: " +
                                (ctx.cadence.empty() ? std::string("(none)") : per_day.str());

  std::size_t sent_now = 0;
  for (const Event& e : ctx.sim_sent) sent_now += (e.timestamp <= ctx.now);
  std::ostringstream current;
  current.precision(2);
  const double elapsed_days = static_cast<double>(ctx.now - ctx.sim_start) / kSecondsPerDay;
  current << std::fixed << "You sent " << sent_now << " messages in " << elapsed_days << " days since takeover.";
  v["curr_sent_pattern_info"] = current.str();

  std::ostringstream checks;
  std::size_t shown = 0;
  for (Timestamp t : ctx.check_history) {
    if (t > ctx.now) continue;
    checks << (shown++ ? "\n" : "") << "- " << format_time(t) << " UTC";
  }
  v["check_history_info"] = shown ? checks.str() : "(none)";
  v["scheduled_next_check_info"] =
      ctx.suggested_next_check ? format_time(*ctx.suggested_next_check) + " UTC" : "(no suggestion)";

  const std::size_t limit = cfg.max_history_items;
  v["real_received_history_text"] = render_events(ctx.real_received, ctx, limit);
  v["real_sent_history_text"] = render_events(ctx.real_sent, ctx, limit);
  v["received_emails_text"] = render_events(ctx.sim_received, ctx, limit);
  v["sent_emails_text"] = render_events(ctx.sim_sent, ctx, limit);
  v["incoming_emails_text"] = render_events(ctx.unread, ctx, limit);

  return {{"system", substitute(tmpl.system, v)}, {"user", substitute(tmpl.user, v)}};
}

std::string build_request_body(const LLMEndpointConfig& cfg, const std::vector<ChatMessage>& messages) {
  nlohmann::ordered_json j;
  j["model"] = cfg.model_name;
  auto& msgs = j["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  j["temperature"] = cfg.temperature;
  j["seed"] = cfg.request_seed;
  return j.dump();
}

// ---------------------------------------------------------------------------
// Response parsing

std::string extract_reply_content(std::string_view response_body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(response_body);
  } catch (const nlohmann::json::parse_error& e) {
    throw DecisionParseError(std::string("response is not JSON: ") + e.what());
  }
  const nlohmann::json* msg = nullptr;
  if (j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
    msg = &j["choices"][0]["message"];
  } else if (j.contains("message")) {
    msg = &j["message"];
  }
  if (msg && msg->is_object() && msg->contains("content") && (*msg)["content"].is_string()) {
    return (*msg)["content"].get<std::string>();
  }
  if (j.contains("content") && j["content"].is_string()) return j["content"].get<std::string>();
  throw DecisionParseError("response has no assistant message content");
}

ActionDecision parse_decision(std::string_view content, const AgentContext& ctx) {
  const auto open = content.find('{');
  const auto close = content.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw DecisionParseError("no JSON object in reply");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(content.substr(open, close - open + 1));
  } catch (const nlohmann::json::parse_error& e) {
    throw DecisionParseError(std::string("malformed decision JSON: ") + e.what());
  }
  if (!j.is_object()) throw DecisionParseError("decision must be a JSON object");

  ActionDecision d;
  if (auto it = j.find("reasoning"); it != j.end() && it->is_string()) d.reasoning = it->get<std::string>();

  if (auto it = j.find("actions"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw DecisionParseError("'actions' must be an array");
    for (const auto& a : *it) {
      if (!a.is_object()) throw DecisionParseError("each action must be an object");
      std::string type = a.value("type", std::string{});
      std::transform(type.begin(), type.end(), type.begin(), [](unsigned char c) { return std::tolower(c); });
      if (type == "none" || type == "idle") continue;
      Action act;
      if (type == "reply") {
        act.type = ActionType::reply;
      } else if (type == "initiate") {
        act.type = ActionType::initiate;
      } else {
        throw DecisionParseError("unknown action type '" + type + "'");
      }
      std::vector<std::string> names;
      if (auto r = a.find("recipients"); r != a.end()) {
        if (r->is_string()) {
          names.push_back(r->get<std::string>());
        } else if (r->is_array()) {
          for (const auto& x : *r) {
            if (x.is_string()) names.push_back(x.get<std::string>());
          }
        }
      }
      for (const auto& name : names) {
        const auto idx = ctx.registry->find(name);
        if (!idx || *idx == ctx.agent) continue;
        if (std::find(act.recipients.begin(), act.recipients.end(), *idx) == act.recipients.end()) {
          act.recipients.push_back(*idx);
        }
      }
      if (act.recipients.empty()) continue;
      if (auto t = a.find("thread"); t != a.end()) {
        if (t->is_number_integer()) {
          act.thread = t->get<std::int64_t>();
        } else if (t->is_string()) {
          try {
            act.thread = std::stoll(t->get<std::string>());
          } catch (const std::exception&) {
          }
        }
      }
      if (auto b = a.find("body"); b != a.end() && b->is_string()) act.body = b->get<std::string>();
      d.actions.push_back(std::move(act));
    }
  }

  const auto nc = j.find("next_check");
  if (nc == j.end() || nc->is_null()) throw DecisionParseError("missing next_check");
  if (nc->is_number_integer()) {
    d.next_check = nc->get<Timestamp>();
  } else if (nc->is_string()) {
    try {
      d.next_check = parse_time(nc->get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw DecisionParseError(std::string("bad next_check: ") + e.what());
    }
  } else {
    throw DecisionParseError("next_check must be a datetime string or epoch seconds");
  }
  if (d.next_check <= ctx.now) {
    d.next_check = ctx.now + kClampSeconds;
    d.next_check_clamped = true;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Transport

namespace {

class HttpTransport final : public ChatTransport {
 public:
  explicit HttpTransport(const LLMEndpointConfig& cfg) : client_(cfg.base_url), path_(cfg.path) {
    const auto secs = static_cast<time_t>(cfg.timeout_seconds);
    const auto usecs = static_cast<time_t>((cfg.timeout_seconds - static_cast<double>(secs)) * 1e6);
    client_.set_connection_timeout(secs, usecs);
    client_.set_read_timeout(secs, usecs);
    client_.set_write_timeout(secs, usecs);
    if (const char* key = std::getenv(cfg.api_key_env.c_str()); key && *key) {
      client_.set_bearer_token_auth(key);
    }
  }

  Response post(const std::string& body) override {
    auto res = client_.Post(path_, body, "application/json");
    if (!res) throw LlmError("request failed: " + httplib::to_string(res.error()));
    return {res->status, res->body};
  }

 private:
  httplib::Client client_;
  std::string path_;
};

std::string send_with_retry(const LLMEndpointConfig& cfg, ChatTransport& transport, const std::string& body,
                            LlmCounters* counters) {
  std::string last_error;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0) {
      if (counters) ++counters->retries;
      const double wait = cfg.backoff_initial_seconds * static_cast<double>(1LL << std::min(attempt - 1, 20));
      std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    }
    if (counters) ++counters->calls;
    try {
      const auto res = transport.post(body);
      if (res.status == 200) return res.body;
      last_error = "HTTP status " + std::to_string(res.status);
      if (res.status != 429 && res.status < 500) throw LlmError("non-retryable " + last_error);
    } catch (const LlmError& e) {
      if (std::string_view(e.what()).starts_with("non-retryable")) throw;
      last_error = e.what();
    }
  }
  throw LlmError("giving up after " + std::to_string(cfg.max_retries + 1) + " attempts: " + last_error);
}

}  // namespace

std::unique_ptr<ChatTransport> make_http_transport(const LLMEndpointConfig& cfg) {
  cfg.validate();
  return std::make_unique<HttpTransport>(cfg);
}

ActionDecision llm_decide(const LLMEndpointConfig& cfg, const PromptTemplate& tmpl, const AgentContext& ctx,
                          ChatTransport& transport, LlmCounters* counters) {
  auto messages = render_prompt(tmpl, ctx, cfg);
  for (int attempt = 0;; ++attempt) {
    const std::string raw = send_with_retry(cfg, transport, build_request_body(cfg, messages), counters);
    std::string content;
    try {
      content = extract_reply_content(raw);
      ActionDecision d = parse_decision(content, ctx);
      if (d.next_check_clamped && counters) ++counters->clamps;
      return d;
    } catch (const DecisionParseError& e) {
      if (attempt >= 1) throw DecisionParseError(std::string("unparseable after repair prompt: ") + e.what());
      if (counters) ++counters->repairs;
      messages.push_back({"assistant", content.empty() ? raw : content});
      messages.push_back({"user", std::string("Your previous answer could not be used (") + e.what() +
                                      "). Answer again with only one JSON object of the form " +
                                      kResponseSchema + "."});
    }
  }
}

LlmPolicy::LlmPolicy(LLMEndpointConfig cfg, PromptTemplate tmpl, std::unique_ptr<ChatTransport> transport)
    : cfg_(std::move(cfg)), tmpl_(std::move(tmpl)), transport_(std::move(transport)) {
  cfg_.validate();
}

ActionDecision LlmPolicy::decide(const AgentContext& ctx) {
  return llm_decide(cfg_, tmpl_, ctx, *transport_, &counters_);
}

}  // namespace tnsim::agents
