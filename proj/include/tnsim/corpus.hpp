#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tnsim/time.hpp"

namespace tnsim {

using AgentIndex = std::uint32_t;

struct AgentId {
  AgentIndex index = 0;
  std::optional<std::string> label;

  friend bool operator==(const AgentId&, const AgentId&) = default;
};

/// Set of agents, ordered by index. Indices need not be contiguous (a
/// registry restricted to a subnetwork keeps the original indices), so
/// per-agent arrays are sized by index_bound().
class AgentRegistry {
 public:
  AgentRegistry() = default;
  explicit AgentRegistry(std::vector<AgentId> agents);

  /// Dense registry with indices assigned in lexicographic label order.
  static AgentRegistry from_labels(std::vector<std::string> labels);

  std::size_t size() const noexcept { return agents_.size(); }
  bool empty() const noexcept { return agents_.empty(); }
  AgentIndex index_bound() const noexcept {
    return agents_.empty() ? 0 : agents_.back().index + 1;
  }
  bool contains(AgentIndex index) const noexcept;
  std::optional<AgentIndex> find(std::string_view label) const;
  /// Label if present, the decimal index otherwise.
  std::string name(AgentIndex index) const;
  std::span<const AgentId> agents() const noexcept { return agents_; }

  AgentRegistry without(std::span<const AgentIndex> removed) const;

  friend bool operator==(const AgentRegistry& a, const AgentRegistry& b) {
    return a.agents_ == b.agents_;
  }

 private:
  std::vector<AgentId> agents_;
  std::vector<std::int64_t> slot_;  // index -> position in agents_, -1 if absent
  std::unordered_map<std::string, AgentIndex> by_label_;
};

enum class EventKind { organic, trigger };

struct Event {
  std::uint64_t id = 0;
  AgentIndex sender = 0;
  std::vector<AgentIndex> recipients;
  Timestamp timestamp = 0;
  EventKind kind = EventKind::organic;
  std::optional<std::int64_t> thread;
  std::optional<std::string> body;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Ordering used everywhere a log is sorted.
inline bool chronological(const Event& a, const Event& b) {
  return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.id < b.id;
}

/// Immutable, validated event stream sorted by (timestamp, id).
class EventLog {
 public:
  EventLog() = default;
  /// Sorts the events and validates: nonempty recipient lists, unique ids,
  /// every participant registered. Throws InputError.
  EventLog(AgentRegistry registry, std::vector<Event> events);

  const AgentRegistry& registry() const noexcept { return registry_; }
  std::span<const Event> events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  auto begin() const noexcept { return events_.begin(); }
  auto end() const noexcept { return events_.end(); }
  const Event& operator[](std::size_t i) const { return events_[i]; }

  friend bool operator==(const EventLog& a, const EventLog& b) {
    return a.registry_ == b.registry_ && a.events_ == b.events_;
  }

 private:
  AgentRegistry registry_;
  std::vector<Event> events_;
};

/// One directed (sender, recipient) pair of an event.
struct Edge {
  AgentIndex src = 0;
  AgentIndex dst = 0;
  Timestamp t = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Expands every event into one edge per recipient, in log order.
std::vector<Edge> expand_edges(const EventLog& log, bool drop_self_loops = true);

enum class LogFormat { jsonl, csv };

std::optional<LogFormat> format_from_string(std::string_view name);

/// Reads a log from disk. Agents are registered in lexicographic label
/// order, so the result does not depend on line order or file format.
EventLog ingest(const std::filesystem::path& path, LogFormat format);
EventLog parse_jsonl(std::istream& in);
EventLog parse_csv(std::istream& in);

/// Canonical serialization: one JSON object per line, sorted by (ts, id).
void write_jsonl(const EventLog& log, std::ostream& out);
std::string to_jsonl(const EventLog& log);
void write_csv(const EventLog& log, std::ostream& out);

/// Events with t0 <= timestamp < t1; the registry is kept.
EventLog window(const EventLog& log, Timestamp t0, Timestamp t1);

/// Same registry, events replaced.
EventLog with_events(const EventLog& log, std::vector<Event> events);

/// Moves the events onto `target`, matching agents by name. Throws
/// InputError when some participant is missing from the target.
EventLog reindex(const EventLog& log, const AgentRegistry& target);

/// Dense lexicographic registry over the names of both registries.
AgentRegistry merged_registry(const AgentRegistry& a, const AgentRegistry& b);

struct StatsSummary {
  std::size_t n_agents = 0;
  std::pair<Timestamp, Timestamp> time_span{0, 0};
  std::size_t total_events = 0;
  double median_events_per_agent = 0;
  double median_events_per_week = 0;
  double r24 = 0;
  double weekend_ratio = 0;
  /// Absent when no agent has three or more sent events.
  std::optional<double> burstiness_median;
  double density = 0;
  double transitivity = 0;
  double global_efficiency = 0;
  double reciprocity = 0;
};

/// Dataset-level summary. Temporal fields use the sender's timestamps;
/// graph fields use the aggregated simple graph without self-loops.
/// Throws InputError on an empty log.
StatsSummary corpus_stats(const EventLog& log);

std::string stats_to_json(const StatsSummary& stats);

double median(std::vector<double> values);

}  // namespace tnsim
