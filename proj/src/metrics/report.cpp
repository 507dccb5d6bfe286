#include "tnsim/metrics/report.hpp"

#include <algorithm>
#include <functional>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "tnsim/errors.hpp"
#include "tnsim/metrics/motifs.hpp"
#include "tnsim/metrics/temporal.hpp"
#include "tnsim/metrics/topology.hpp"

namespace tnsim::metrics {

namespace {

struct MetricSpec {
  const char* name;
  Category category;
  bool higher_is_better;
};

constexpr MetricSpec kSpecs[] = {
    {"r24", Category::temporal_rhythms, false},      {"HoD", Category::temporal_rhythms, false},
    {"WkndDrop", Category::temporal_rhythms, false}, {"Burst", Category::temporal_rhythms, false},
    {"2-Eg-2h", Category::temporal_dynamics, false}, {"2-Eg-8h", Category::temporal_dynamics, false},
    {"3-Eg-24h", Category::temporal_dynamics, false}, {"3-Eg-48h", Category::temporal_dynamics, false},
    {"DegDist", Category::global_topology, false},   {"Trans", Category::global_topology, false},
    {"GlobEff", Category::global_topology, false},   {"Recip", Category::global_topology, false},
    {"TopoOvlp", Category::local_topology, false},   {"DegCen", Category::local_topology, true},
    {"BetwCen", Category::local_topology, true},
};

std::optional<Category> category_from_name(std::string_view s) {
  for (int c = 0; c < 4; ++c) {
    if (category_name(static_cast<Category>(c)) == s) return static_cast<Category>(c);
  }
  return std::nullopt;
}

}  // namespace

const MetricEntry* MetricsReport::find(std::string_view name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& s : kSpecs) v.emplace_back(s.name);
    return v;
  }();
  return names;
}

EventLog exclude_triggers(const EventLog& log, std::span<const AgentIndex> triggers) {
  if (triggers.empty()) return log;
  auto is_trigger = [&](AgentIndex a) { return std::find(triggers.begin(), triggers.end(), a) != triggers.end(); };
  std::vector<Event> kept;
  for (const Event& e : log) {
    if (is_trigger(e.sender) || std::any_of(e.recipients.begin(), e.recipients.end(), is_trigger)) continue;
    kept.push_back(e);
  }
  return EventLog(log.registry().without(triggers), std::move(kept));
}

MetricsReport evaluate_all(const EventLog& sim_in, const EventLog& gt_in, std::span<const AgentIndex> triggers,
                           TimeWindow window) {
  const EventLog sim = exclude_triggers(tnsim::window(sim_in, window.start, window.end), triggers);
  const EventLog gt = exclude_triggers(tnsim::window(gt_in, window.start, window.end), triggers);
  constexpr Timestamp h = kSecondsPerHour;

  const std::function<Scored()> compute[] = {
      [&] { return r24_err(sim, gt, window); },
      [&] { return hod_emd(sim, gt); },
      [&] { return wknd_drop_err(sim, gt, window); },
      [&] { return burstiness_emd(sim, gt); },
      [&] { return motif_jsd(sim, gt, 2, 2 * h); },
      [&] { return motif_jsd(sim, gt, 2, 8 * h); },
      [&] { return motif_jsd(sim, gt, 3, 24 * h); },
      [&] { return motif_jsd(sim, gt, 3, 48 * h); },
      [&] { return degdist_emd(sim, gt, window); },
      [&] { return topology_rmse(sim, gt, window, DailyKind::transitivity); },
      [&] { return topology_rmse(sim, gt, window, DailyKind::global_efficiency); },
      [&] { return topology_rmse(sim, gt, window, DailyKind::reciprocity); },
      [&] { return topo_overlap_emd(sim, gt, window); },
      [&] { return centrality_jaccard(sim, gt, window, CentralityKind::degree); },
      [&] { return centrality_jaccard(sim, gt, window, CentralityKind::betweenness); },
  };
  static_assert(std::size(compute) == std::size(kSpecs));

  MetricsReport report;
  report.window = window;
  for (std::size_t k = 0; k < std::size(kSpecs); ++k) {
    MetricEntry e{kSpecs[k].name, kSpecs[k].category, kSpecs[k].higher_is_better, std::nullopt, {}, std::nullopt};
    try {
      Scored s = compute[k]();
      e.value = s.value;
      e.flags = std::move(s.flags);
    } catch (const MetricError& ex) {
      e.skipped = ex.what();
    } catch (const std::invalid_argument& ex) {
      e.skipped = ex.what();
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

std::string report_to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["window"] = {{"start", report.window.start}, {"end", report.window.end}};
  auto& metrics = j["metrics"] = nlohmann::ordered_json::array();
  for (const auto& e : report.entries) {
    nlohmann::ordered_json m;
    m["name"] = e.name;
    m["category"] = category_name(e.category);
    m["direction"] = e.higher_is_better ? "higher" : "lower";
    m["value"] = e.value ? nlohmann::ordered_json(*e.value) : nlohmann::ordered_json(nullptr);
    m["flags"] = e.flags;
    m["skipped"] = e.skipped ? nlohmann::ordered_json(*e.skipped) : nlohmann::ordered_json(nullptr);
    metrics.push_back(std::move(m));
  }
  return j.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    MetricsReport r;
    r.window = {j.at("window").at("start").get<Timestamp>(), j.at("window").at("end").get<Timestamp>()};
    for (const auto& m : j.at("metrics")) {
      MetricEntry e;
      e.name = m.at("name").get<std::string>();
      const auto cat = category_from_name(m.at("category").get<std::string>());
      if (!cat) throw InputError("report: unknown category for " + e.name);
      e.category = *cat;
      e.higher_is_better = m.at("direction").get<std::string>() == "higher";
      if (!m.at("value").is_null()) e.value = m.at("value").get<double>();
      e.flags = m.value("flags", std::vector<std::string>{});
      if (m.contains("skipped") && !m["skipped"].is_null()) e.skipped = m["skipped"].get<std::string>();
      r.entries.push_back(std::move(e));
    }
    return r;
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("malformed report: ") + ex.what());
  }
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_to_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "name,category,value,direction,flags\n";
  for (const auto& e : report.entries) {
    std::string flags;
    if (e.skipped) flags = "skipped: " + *e.skipped;
    for (const auto& f : e.flags) flags += (flags.empty() ? "" : "; ") + f;
    std::ostringstream value;
    if (e.value) value << std::setprecision(17) << *e.value;
    out << csv_field(e.name) << ',' << category_name(e.category) << ',' << value.str() << ','
        << (e.higher_is_better ? "higher" : "lower") << ',' << csv_field(flags) << '\n';
  }
  return out.str();
}

}  // namespace tnsim::metrics
