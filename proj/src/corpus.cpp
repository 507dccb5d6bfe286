#include "tnsim/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "tnsim/errors.hpp"
#include "tnsim/graph.hpp"
#include "tnsim/metrics/temporal.hpp"

namespace tnsim {

// ---------------------------------------------------------------------------
// Registry

AgentRegistry::AgentRegistry(std::vector<AgentId> agents) : agents_(std::move(agents)) {
  std::sort(agents_.begin(), agents_.end(),
            [](const AgentId& a, const AgentId& b) { return a.index < b.index; });
  slot_.assign(index_bound(), -1);
  for (std::size_t k = 0; k < agents_.size(); ++k) {
    const AgentId& a = agents_[k];
    if (slot_[a.index] >= 0) throw InputError("duplicate agent index " + std::to_string(a.index));
    slot_[a.index] = static_cast<std::int64_t>(k);
    if (a.label && !by_label_.emplace(*a.label, a.index).second) {
      throw InputError("duplicate agent label '" + *a.label + "'");
    }
  }
}

AgentRegistry AgentRegistry::from_labels(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  std::vector<AgentId> agents;
  agents.reserve(labels.size());
  for (std::size_t k = 0; k < labels.size(); ++k) {
    agents.push_back({static_cast<AgentIndex>(k), std::move(labels[k])});
  }
  return AgentRegistry(std::move(agents));
}

bool AgentRegistry::contains(AgentIndex index) const noexcept {
  return index < slot_.size() && slot_[index] >= 0;
}

std::optional<AgentIndex> AgentRegistry::find(std::string_view label) const {
  auto it = by_label_.find(std::string(label));
  if (it == by_label_.end()) return std::nullopt;
  return it->second;
}

std::string AgentRegistry::name(AgentIndex index) const {
  if (contains(index)) {
    const auto& a = agents_[static_cast<std::size_t>(slot_[index])];
    if (a.label) return *a.label;
  }
  return std::to_string(index);
}

AgentRegistry AgentRegistry::without(std::span<const AgentIndex> removed) const {
  const std::unordered_set<AgentIndex> drop(removed.begin(), removed.end());
  std::vector<AgentId> kept;
  for (const auto& a : agents_) {
    if (!drop.contains(a.index)) kept.push_back(a);
  }
  return AgentRegistry(std::move(kept));
}

// ---------------------------------------------------------------------------
// EventLog

EventLog::EventLog(AgentRegistry registry, std::vector<Event> events)
    : registry_(std::move(registry)), events_(std::move(events)) {
  std::sort(events_.begin(), events_.end(), chronological);
  for (std::size_t k = 0; k < events_.size(); ++k) {
    const Event& e = events_[k];
    if (e.recipients.empty()) throw InputError("event " + std::to_string(e.id) + " has no recipients");
    if (!registry_.contains(e.sender)) {
      throw InputError("event " + std::to_string(e.id) + ": unregistered sender");
    }
    for (AgentIndex r : e.recipients) {
      if (!registry_.contains(r)) {
        throw InputError("event " + std::to_string(e.id) + ": unregistered recipient");
      }
    }
  }
  std::unordered_set<std::uint64_t> ids;
  ids.reserve(events_.size());
  for (const Event& e : events_) {
    if (!ids.insert(e.id).second) throw InputError("duplicate event id " + std::to_string(e.id));
  }
}

std::vector<Edge> expand_edges(const EventLog& log, bool drop_self_loops) {
  std::vector<Edge> edges;
  edges.reserve(log.size());
  for (const Event& e : log) {
    for (AgentIndex r : e.recipients) {
      if (drop_self_loops && r == e.sender) continue;
      edges.push_back({e.sender, r, e.timestamp});
    }
  }
  return edges;
}

EventLog window(const EventLog& log, Timestamp t0, Timestamp t1) {
  if (t0 > t1) throw InputError("window start after end");
  auto lo = std::lower_bound(log.begin(), log.end(), t0,
                             [](const Event& e, Timestamp t) { return e.timestamp < t; });
  auto hi = std::lower_bound(lo, log.end(), t1,
                             [](const Event& e, Timestamp t) { return e.timestamp < t; });
  return EventLog(log.registry(), std::vector<Event>(lo, hi));
}

EventLog with_events(const EventLog& log, std::vector<Event> events) {
  return EventLog(log.registry(), std::move(events));
}

EventLog reindex(const EventLog& log, const AgentRegistry& target) {
  const AgentRegistry& src = log.registry();
  std::vector<AgentIndex> map(src.index_bound(), 0);
  for (const AgentId& a : src.agents()) {
    const auto idx = target.find(src.name(a.index));
    if (!idx) throw InputError("agent " + src.name(a.index) + " is not in the target registry");
    map[a.index] = *idx;
  }
  std::vector<Event> events(log.begin(), log.end());
  for (Event& e : events) {
    e.sender = map[e.sender];
    for (AgentIndex& r : e.recipients) r = map[r];
  }
  return EventLog(target, std::move(events));
}

AgentRegistry merged_registry(const AgentRegistry& a, const AgentRegistry& b) {
  std::vector<std::string> names;
  for (const AgentId& x : a.agents()) names.push_back(a.name(x.index));
  for (const AgentId& x : b.agents()) names.push_back(b.name(x.index));
  return AgentRegistry::from_labels(std::move(names));
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct RawEvent {
  std::uint64_t id = 0;
  std::string sender;
  std::vector<std::string> recipients;
  Timestamp ts = 0;
  EventKind kind = EventKind::organic;
  std::optional<std::int64_t> thread;
  std::optional<std::string> body;
  std::size_t line = 0;
};

EventLog assemble(std::vector<RawEvent> raw) {
  std::vector<std::string> labels;
  std::map<std::uint64_t, std::size_t> seen;
  for (const auto& r : raw) {
    if (auto [it, fresh] = seen.emplace(r.id, r.line); !fresh) {
      throw ParseError(r.line, "duplicate event id " + std::to_string(r.id) + " (first on line " +
                                   std::to_string(it->second) + ")");
    }
    labels.push_back(r.sender);
    labels.insert(labels.end(), r.recipients.begin(), r.recipients.end());
  }
  AgentRegistry registry = AgentRegistry::from_labels(std::move(labels));
  std::vector<Event> events;
  events.reserve(raw.size());
  for (auto& r : raw) {
    Event e;
    e.id = r.id;
    e.sender = *registry.find(r.sender);
    for (const auto& name : r.recipients) e.recipients.push_back(*registry.find(name));
    e.timestamp = r.ts;
    e.kind = r.kind;
    e.thread = r.thread;
    e.body = std::move(r.body);
    events.push_back(std::move(e));
  }
  return EventLog(std::move(registry), std::move(events));
}

EventKind parse_kind(std::string_view s, std::size_t line) {
  if (s == "organic") return EventKind::organic;
  if (s == "trigger") return EventKind::trigger;
  throw ParseError(line, "unknown kind '" + std::string(s) + "'");
}

RawEvent parse_json_record(const nlohmann::json& j, std::size_t line) {
  if (!j.is_object()) throw ParseError(line, "expected a JSON object");
  RawEvent r;
  r.line = line;
  auto require = [&](const char* key) -> const nlohmann::json& {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(line, std::string("missing field '") + key + "'");
    return *it;
  };
  const auto& id = require("id");
  if (!id.is_number_integer() || id.get<std::int64_t>() < 0) {
    throw ParseError(line, "'id' must be a nonnegative integer");
  }
  r.id = id.get<std::uint64_t>();
  const auto& sender = require("sender");
  if (!sender.is_string()) throw ParseError(line, "'sender' must be a string");
  r.sender = sender.get<std::string>();
  const auto& recips = require("recipients");
  if (!recips.is_array()) throw ParseError(line, "'recipients' must be an array");
  for (const auto& x : recips) {
    if (!x.is_string()) throw ParseError(line, "recipient must be a string");
    r.recipients.push_back(x.get<std::string>());
  }
  if (r.recipients.empty()) throw ParseError(line, "empty recipient list");
  const auto& ts = require("ts");
  if (!ts.is_number_integer()) throw ParseError(line, "'ts' must be an integer");
  r.ts = ts.get<Timestamp>();
  if (auto it = j.find("thread"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw ParseError(line, "'thread' must be an integer or null");
    r.thread = it->get<std::int64_t>();
  }
  if (auto it = j.find("body"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError(line, "'body' must be a string or null");
    r.body = it->get<std::string>();
  }
  if (auto it = j.find("kind"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError(line, "'kind' must be a string");
    r.kind = parse_kind(it->get<std::string>(), line);
  }
  return r;
}

// RFC 4180 fields: quoted fields may contain commas, doubled quotes and
// newlines. Returns false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
  fields.clear();
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++line;
      fields.push_back(std::move(field));
      return true;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw ParseError(line, "unterminated quoted field");
  if (!any) return false;
  fields.push_back(std::move(field));
  ++line;
  return true;
}

template <typename Int>
Int parse_csv_int(const std::string& s, std::size_t line, const char* what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    if constexpr (std::is_unsigned_v<Int>) {
      if (v < 0) throw std::invalid_argument(s);
    }
    return static_cast<Int>(v);
  } catch (const std::exception&) {
    throw ParseError(line, std::string("bad ") + what + " '" + s + "'");
  }
}

}  // namespace

EventLog parse_jsonl(std::istream& in) {
  std::vector<RawEvent> raw;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line, std::string("invalid JSON: ") + e.what());
    }
    raw.push_back(parse_json_record(j, line));
  }
  return assemble(std::move(raw));
}

EventLog parse_csv(std::istream& in) {
  std::vector<RawEvent> raw;
  std::vector<std::string> f;
  std::size_t line = 0;
  bool first = true;
  for (;;) {
    const std::size_t start_line = line + 1;
    if (!read_csv_record(in, f, line)) break;
    if (f.size() == 1 && f[0].empty()) continue;
    if (first && !f.empty() && f[0] == "id") {
      first = false;
      continue;
    }
    first = false;
    if (f.size() < 4 || f.size() > 7) {
      throw ParseError(start_line, "expected columns id,sender,recipients,ts,thread,body");
    }
    f.resize(7);
    RawEvent r;
    r.line = start_line;
    r.id = parse_csv_int<std::uint64_t>(f[0], start_line, "id");
    r.sender = f[1];
    if (r.sender.empty()) throw ParseError(start_line, "empty sender");
    std::stringstream rs(f[2]);
    for (std::string name; std::getline(rs, name, ';');) {
      if (!name.empty()) r.recipients.push_back(name);
    }
    if (r.recipients.empty()) throw ParseError(start_line, "empty recipient list");
    r.ts = parse_csv_int<Timestamp>(f[3], start_line, "ts");
    if (!f[4].empty()) r.thread = parse_csv_int<std::int64_t>(f[4], start_line, "thread");
    if (!f[5].empty()) r.body = f[5];
    if (!f[6].empty()) r.kind = parse_kind(f[6], start_line);
    raw.push_back(std::move(r));
  }
  return assemble(std::move(raw));
}

std::optional<LogFormat> format_from_string(std::string_view name) {
  if (name == "jsonl") return LogFormat::jsonl;
  if (name == "csv") return LogFormat::csv;
  return std::nullopt;
}

EventLog ingest(const std::filesystem::path& path, LogFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return format == LogFormat::jsonl ? parse_jsonl(in) : parse_csv(in);
}

// ---------------------------------------------------------------------------
// Serialization

void write_jsonl(const EventLog& log, std::ostream& out) {
  const auto& reg = log.registry();
  for (const Event& e : log) {
    nlohmann::ordered_json j;
    j["id"] = e.id;
    j["sender"] = reg.name(e.sender);
    auto& rec = j["recipients"] = nlohmann::ordered_json::array();
    for (AgentIndex r : e.recipients) rec.push_back(reg.name(r));
    j["ts"] = e.timestamp;
    j["thread"] = e.thread ? nlohmann::ordered_json(*e.thread) : nlohmann::ordered_json(nullptr);
    j["body"] = e.body ? nlohmann::ordered_json(*e.body) : nlohmann::ordered_json(nullptr);
    j["kind"] = e.kind == EventKind::trigger ? "trigger" : "organic";
    out << j.dump() << '\n';
  }
}

std::string to_jsonl(const EventLog& log) {
  std::ostringstream s;
  write_jsonl(log, s);
  return s.str();
}

void write_csv(const EventLog& log, std::ostream& out) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  const auto& reg = log.registry();
  out << "id,sender,recipients,ts,thread,body,kind\n";
  for (const Event& e : log) {
    std::string recips;
    for (std::size_t k = 0; k < e.recipients.size(); ++k) {
      if (k) recips += ';';
      recips += reg.name(e.recipients[k]);
    }
    out << e.id << ',' << quote(reg.name(e.sender)) << ',' << quote(recips) << ',' << e.timestamp
        << ',' << (e.thread ? std::to_string(*e.thread) : "") << ',' << (e.body ? quote(*e.body) : "")
        << ',' << (e.kind == EventKind::trigger ? "trigger" : "organic") << '\n';
  }
}

// ---------------------------------------------------------------------------
// Stats

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

StatsSummary corpus_stats(const EventLog& log) {
  if (log.empty()) throw InputError("corpus_stats of an empty log");
  StatsSummary s;
  s.n_agents = log.registry().size();
  s.time_span = {log.events().front().timestamp, log.events().back().timestamp};
  s.total_events = log.size();

  std::map<AgentIndex, double> sent;
  for (const auto& a : log.registry().agents()) sent[a.index] = 0;
  for (const Event& e : log) sent[e.sender] += 1;
  std::vector<double> per_agent;
  for (const auto& [a, n] : sent) per_agent.push_back(n);
  s.median_events_per_agent = median(per_agent);

  const Timestamp first_week = week_start(s.time_span.first);
  const auto n_weeks = static_cast<std::size_t>((week_start(s.time_span.second) - first_week) / kSecondsPerWeek + 1);
  std::vector<double> per_week(n_weeks, 0.0);
  std::size_t weekend = 0;
  for (const Event& e : log) {
    per_week[static_cast<std::size_t>((week_start(e.timestamp) - first_week) / kSecondsPerWeek)] += 1;
    if (is_weekend(e.timestamp)) ++weekend;
  }
  s.median_events_per_week = median(per_week);
  s.weekend_ratio = static_cast<double>(weekend) / static_cast<double>(log.size());

  const metrics::TimeWindow span{day_start(s.time_span.first), day_start(s.time_span.second) + kSecondsPerDay};
  s.r24 = metrics::circadian_autocorrelation(log, span).value;

  const auto bursts = metrics::node_burstiness(log);
  if (!bursts.empty()) s.burstiness_median = median(bursts);

  const Digraph g(expand_edges(log));
  s.density = density(g);
  s.transitivity = transitivity(g);
  s.global_efficiency = global_efficiency(g);
  s.reciprocity = reciprocity(g);
  return s;
}

std::string stats_to_json(const StatsSummary& s) {
  nlohmann::ordered_json j;
  j["n_agents"] = s.n_agents;
  j["time_span"] = {{"start", s.time_span.first}, {"end", s.time_span.second}};
  j["total_events"] = s.total_events;
  j["median_events_per_agent"] = s.median_events_per_agent;
  j["median_events_per_week"] = s.median_events_per_week;
  j["r24"] = s.r24;
  j["weekend_ratio"] = s.weekend_ratio;
  j["burstiness_median"] =
      s.burstiness_median ? nlohmann::ordered_json(*s.burstiness_median) : nlohmann::ordered_json(nullptr);
  j["density"] = s.density;
  j["transitivity"] = s.transitivity;
  j["global_efficiency"] = s.global_efficiency;
  j["reciprocity"] = s.reciprocity;
  return j.dump(2);
}

}  // namespace tnsim
