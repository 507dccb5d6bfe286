#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tnsim/agents.hpp"

namespace tnsim::agents {

struct LLMEndpointConfig {
  std::string base_url;                      // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model_name;
  std::string api_key_env = "OPENAI_API_KEY";  // name of the variable, never the key
  double timeout_seconds = 60;
  int max_retries = 3;
  double temperature = 0;
  std::int64_t request_seed = 42;
  double backoff_initial_seconds = 1.0;
  std::size_t max_history_items = 50;  // per prompt section
  std::string organization_context;

  void validate() const;
};

/// Transport or protocol failure that survived every retry.
class LlmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The reply could not be turned into an ActionDecision.
class DecisionParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChatMessage {
  std::string role;
  std::string content;
};

/// System and user templates with {placeholder} fields.
struct PromptTemplate {
  std::string system;
  std::string user;

  /// Built-in template: mailbox role-play with reply/initiate/none actions,
  /// a next-check time that must lie in the future, and a JSON reply schema.
  static PromptTemplate standard();
  /// JSON file {"system": "...", "user": "..."}.
  static PromptTemplate from_file(const std::string& path);
};

/// Substitutes every placeholder from the context (events and times in UTC).
std::vector<ChatMessage> render_prompt(const PromptTemplate& tmpl, const AgentContext& ctx,
                                       const LLMEndpointConfig& cfg);

/// {model, messages, temperature, seed}
std::string build_request_body(const LLMEndpointConfig& cfg, const std::vector<ChatMessage>& messages);

/// Content of the single assistant message in a chat-completion response.
/// Throws DecisionParseError.
std::string extract_reply_content(std::string_view response_body);

/// Parses {"actions": [{"type", "recipients", "thread", "body"}...],
/// "next_check", "reasoning"}. Recipients that are unknown, the acting agent
/// itself, or duplicates are dropped, then actions left without recipients.
/// A next_check at or before ctx.now is clamped to now + kClampSeconds with
/// the clamp flag set. Throws DecisionParseError.
ActionDecision parse_decision(std::string_view content, const AgentContext& ctx);

/// One HTTP POST of a JSON body; returns the response body.
class ChatTransport {
 public:
  struct Response {
    int status = 0;
    std::string body;
  };
  virtual ~ChatTransport() = default;
  /// Throws LlmError on a connection failure or timeout.
  virtual Response post(const std::string& body) = 0;
};

std::unique_ptr<ChatTransport> make_http_transport(const LLMEndpointConfig& cfg);

struct LlmCounters {
  std::atomic<std::size_t> calls{0};
  std::atomic<std::size_t> retries{0};
  std::atomic<std::size_t> repairs{0};
  std::atomic<std::size_t> clamps{0};
};

/// Renders, sends, and parses one decision. Transport failures, 429 and
/// 5xx are retried max_retries times with exponential backoff; an
/// unparseable reply gets one repair re-prompt.
ActionDecision llm_decide(const LLMEndpointConfig& cfg, const PromptTemplate& tmpl,
                          const AgentContext& ctx, ChatTransport& transport,
                          LlmCounters* counters = nullptr);

class LlmPolicy final : public AgentPolicy {
 public:
  LlmPolicy(LLMEndpointConfig cfg, PromptTemplate tmpl, std::unique_ptr<ChatTransport> transport);
  ActionDecision decide(const AgentContext& ctx) override;
  std::string name() const override { return "llm"; }
  const LlmCounters& counters() const { return counters_; }

 private:
  LLMEndpointConfig cfg_;
  PromptTemplate tmpl_;
  std::unique_ptr<ChatTransport> transport_;
  LlmCounters counters_;
};

}  // namespace tnsim::agents
