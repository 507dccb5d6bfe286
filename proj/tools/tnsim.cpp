// tnsim: corpus statistics, Hawkes fitting, simulation, baselines and
// evaluation. Exit codes: 0 success, 1 computation error, 2 usage/input error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tnsim/agents.hpp"
#include "tnsim/baselines.hpp"
#include "tnsim/corpus.hpp"
#include "tnsim/digest.hpp"
#include "tnsim/errors.hpp"
#include "tnsim/hawkes.hpp"
#include "tnsim/llm_client.hpp"
#include "tnsim/metrics/regret.hpp"
#include "tnsim/metrics/report.hpp"
#include "tnsim/simulator.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace tnsim;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot open " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, std::string_view data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ComputationError("cannot write " + p.string());
  out << data;
  if (!out) throw ComputationError("write failed: " + p.string());
}

LogFormat parse_format(const std::string& s) {
  auto f = format_from_string(s);
  if (!f) throw InputError("unknown format '" + s + "' (expected jsonl or csv)");
  return *f;
}

Timestamp time_from_json(const json& j, const char* what) {
  try {
    if (j.is_number_integer()) return j.get<Timestamp>();
    if (j.is_string()) return parse_time(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
  throw InputError(std::string(what) + " must be epoch seconds or an ISO datetime string");
}

std::pair<Timestamp, Timestamp> parse_window(const std::vector<std::string>& w) {
  if (w.size() != 2) throw InputError("--window takes a start and an end");
  try {
    const Timestamp t0 = parse_time(w[0]), t1 = parse_time(w[1]);
    if (t0 >= t1) throw InputError("window start must precede its end");
    return {t0, t1};
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("--window: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Run manifest

class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)), started_(std::chrono::steady_clock::now()) {}

  void input(const fs::path& p) { inputs_.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}}); }
  void output(const fs::path& p) { outputs_.push_back(p.string()); }
  json& config() { return config_; }
  json& counters() { return counters_; }
  json& extra() { return extra_; }
  void seed(std::uint64_t s) { seed_ = s; }

  void write(const fs::path& dir, const std::optional<std::string>& error) const {
    json j;
    j["command"] = command_;
    j["version"] = kVersion;
    j["status"] = error ? "error" : "ok";
    if (error) j["error"] = *error;
    j["config"] = config_;
    j["seed"] = seed_ ? json(*seed_) : json(nullptr);
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    j["counters"] = counters_;
    for (const auto& [k, v] : extra_.items()) j[k] = v;
    j["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    fs::create_directories(dir);
    write_file(dir / "manifest.json", j.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::chrono::steady_clock::time_point started_;
  json config_ = json::object();
  json inputs_ = json::array();
  json outputs_ = json::array();
  json counters_ = json::object();
  json extra_ = json::object();
  std::optional<std::uint64_t> seed_;
};

/// Runs the computation; on any failure other than bad input the manifest is
/// still written, then the error propagates.
template <class F>
void guarded(Manifest& m, const fs::path& out, F&& body) {
  try {
    body();
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    try {
      m.write(out, std::string(e.what()));
    } catch (...) {
    }
    throw;
  }
  m.write(out, std::nullopt);
}

// ---------------------------------------------------------------------------
// Run configuration (JSON)

struct RunConfig {
  fs::path path;
  json raw;
  fs::path corpus;
  LogFormat format = LogFormat::jsonl;
  Timestamp start = 0, end = 0;
  int history_days = 32;
  double trigger_ratio = 0.10;
  std::uint64_t seed = 42;
  int max_actions_per_wake = 5;
  double periodic_interval_hours = 3;
  std::optional<fs::path> model;
  bool hawkes_llm_override = false;
  std::map<std::string, std::string> personas;
  json llm = json::object();
  json rewire = json::object();
};

RunConfig load_config(const fs::path& path) {
  RunConfig c;
  c.path = path;
  try {
    c.raw = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  const json& j = c.raw;
  if (!j.is_object()) throw InputError("config must be a JSON object");
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  try {
    c.corpus = resolve(j.at("corpus").get<std::string>());
    c.format = parse_format(j.value("format", std::string("jsonl")));
    const json& w = j.at("window");
    c.start = time_from_json(w.at("start"), "window.start");
    c.end = time_from_json(w.at("end"), "window.end");
    c.history_days = j.value("history_days", 32);
    c.trigger_ratio = j.value("trigger_ratio", 0.10);
    c.seed = j.value("seed", std::uint64_t{42});
    c.max_actions_per_wake = j.value("max_actions_per_wake", 5);
    c.periodic_interval_hours = j.value("periodic_interval_hours", 3.0);
    if (j.contains("model") && !j["model"].is_null()) c.model = resolve(j["model"].get<std::string>());
    c.hawkes_llm_override = j.value("hawkes_llm_override", false);
    if (j.contains("personas")) c.personas = j["personas"].get<std::map<std::string, std::string>>();
    if (j.contains("llm")) c.llm = j["llm"];
    if (j.contains("rewire")) c.rewire = j["rewire"];
  } catch (const json::exception& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  if (c.llm.contains("api_key")) throw InputError("config: API keys are read from the environment, never from config");
  if (c.start >= c.end) throw InputError("config: window start must precede its end");
  return c;
}

agents::LLMEndpointConfig llm_config(const RunConfig& c) {
  agents::LLMEndpointConfig cfg;
  const json& j = c.llm;
  try {
    cfg.base_url = j.value("base_url", std::string{});
    cfg.path = j.value("path", cfg.path);
    cfg.model_name = j.value("model_name", std::string{});
    cfg.api_key_env = j.value("api_key_env", cfg.api_key_env);
    cfg.timeout_seconds = j.value("timeout_seconds", cfg.timeout_seconds);
    cfg.max_retries = j.value("max_retries", cfg.max_retries);
    cfg.temperature = j.value("temperature", cfg.temperature);
    cfg.request_seed = j.value("request_seed", cfg.request_seed);
    cfg.backoff_initial_seconds = j.value("backoff_initial_seconds", cfg.backoff_initial_seconds);
    cfg.max_history_items = j.value("max_history_items", cfg.max_history_items);
    cfg.organization_context = j.value("organization_context", std::string{});
  } catch (const json::exception& e) {
    throw InputError(std::string("config llm block: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

hawkes::HawkesModel load_or_fit_model(const RunConfig& c, const EventLog& corpus, Manifest& m, bool* fitted) {
  const Timestamp h0 = c.start - c.history_days * kSecondsPerDay;
  hawkes::HawkesModel model;
  if (c.model) {
    m.input(*c.model);
    model = hawkes::model_from_json(read_file(*c.model));
    *fitted = false;
  } else {
    auto r = hawkes::fit(corpus, h0, c.start);
    m.counters()["fit_iterations"] = r.iterations;
    m.counters()["fit_converged"] = r.converged;
    model = std::move(r.model);
    *fitted = true;
  }
  const auto& reg = corpus.registry();
  if (model.dimension() != static_cast<Eigen::Index>(reg.index_bound())) {
    throw InputError("model dimension does not match the corpus agents");
  }
  for (const AgentId& a : reg.agents()) {
    if (model.agents[a.index] != reg.name(a.index)) throw InputError("model agent names do not match the corpus");
  }
  m.counters()["stability_warning"] = model.stability_warning();
  return model;
}

json trigger_names(const sim::TriggerPlan& plan, const AgentRegistry& reg) {
  json names = json::array();
  for (AgentIndex a : plan.trigger_agents) names.push_back(reg.name(a));
  return names;
}

// ---------------------------------------------------------------------------
// Commands

struct StatsArgs {
  std::string input, format = "jsonl", out;
};

void print_stats(const StatsSummary& s) {
  auto row = [](const char* k, const std::string& v) { std::cout << std::left << std::setw(26) << k << v << '\n'; };
  auto num = [](double x) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(4) << x;
    return o.str();
  };
  row("agents", std::to_string(s.n_agents));
  row("events", std::to_string(s.total_events));
  row("span", format_time(s.time_span.first) + " .. " + format_time(s.time_span.second));
  row("median events/agent", num(s.median_events_per_agent));
  row("median events/week", num(s.median_events_per_week));
  row("r24", num(s.r24));
  row("weekend event share", num(s.weekend_ratio));
  row("median burstiness", s.burstiness_median ? num(*s.burstiness_median) : "n/a");
  row("density", num(s.density));
  row("transitivity", num(s.transitivity));
  row("global efficiency", num(s.global_efficiency));
  row("reciprocity", num(s.reciprocity));
}

int cmd_stats(const StatsArgs& a) {
  const EventLog log = ingest(a.input, parse_format(a.format));
  const StatsSummary s = corpus_stats(log);
  print_stats(s);
  if (a.out.empty()) return 0;
  Manifest m("stats");
  m.input(a.input);
  m.config() = {{"input", a.input}, {"format", a.format}};
  guarded(m, a.out, [&] {
    fs::create_directories(a.out);
    write_file(fs::path(a.out) / "stats.json", stats_to_json(s) + "\n");
    m.output(fs::path(a.out) / "stats.json");
    m.counters()["events"] = s.total_events;
  });
  return 0;
}

struct FitArgs {
  std::string input, format = "jsonl", out;
  std::vector<std::string> window;
  bool full = false;
  std::optional<double> beta;
  int max_iters = 500;
  double tolerance = 1e-6;
};

int cmd_fit(const FitArgs& a) {
  const EventLog log = ingest(a.input, parse_format(a.format));
  const auto [t0, t1] = parse_window(a.window);
  if (a.beta && !(*a.beta > 0)) throw InputError("--beta must be positive");
  hawkes::FitConfig cfg;
  cfg.diagonal_only = !a.full;
  cfg.beta_override_per_hour = a.beta;
  cfg.max_iters = a.max_iters;
  cfg.tolerance = a.tolerance;

  Manifest m("fit");
  m.input(a.input);
  m.config() = {{"input", a.input},   {"format", a.format}, {"window", {t0, t1}}, {"diagonal_only", !a.full},
                {"beta", a.beta ? json(*a.beta) : json(nullptr)}, {"max_iters", a.max_iters},
                {"tolerance", a.tolerance}};
  guarded(m, a.out, [&] {
    const auto r = hawkes::fit(log, t0, t1, cfg);
    fs::create_directories(a.out);
    write_file(fs::path(a.out) / "model.json", hawkes::model_to_json(r.model));
    m.output(fs::path(a.out) / "model.json");
    m.counters() = {{"iterations", r.iterations},
                    {"converged", r.converged},
                    {"log_likelihood", r.log_likelihood},
                    {"beta_per_hour", r.model.beta_per_hour},
                    {"stability_warning", r.model.stability_warning()}};
    if (r.model.stability_warning()) std::cerr << "warning: fitted excitation is supercritical\n";
  });
  return 0;
}

struct SimulateArgs {
  std::string config, policy = "periodic", agent = "stub", out;
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& a) {
  RunConfig c = load_config(a.config);
  if (a.seed) c.seed = *a.seed;
  const EventLog corpus = ingest(c.corpus, c.format);
  const AgentRegistry& reg = corpus.registry();

  sim::SimConfig sc;
  sc.start = c.start;
  sc.end = c.end;
  sc.history_days = c.history_days;
  sc.trigger_ratio = c.trigger_ratio;
  sc.seed = c.seed;
  sc.max_actions_per_wake = c.max_actions_per_wake;
  for (const auto& [name, text] : c.personas) {
    if (auto idx = reg.find(name)) sc.personas[*idx] = text;
  }
  const Timestamp h0 = sc.history_start();

  Manifest m("simulate");
  m.input(a.config);
  m.input(c.corpus);
  m.config() = c.raw;
  m.config()["policy"] = a.policy;
  m.config()["agent"] = a.agent;
  m.seed(c.seed);

  bool fitted = false;
  std::optional<hawkes::HawkesModel> model;
  if (a.policy == "periodic") {
    sc.policy = sim::Periodic{c.periodic_interval_hours};
  } else if (a.policy == "llm-predicted") {
    sc.policy = sim::LLMPredicted{};
  } else if (a.policy == "hod") {
    sc.policy = sim::EmpiricalHoD::from_history(corpus, h0, c.start);
  } else if (a.policy == "hawkes") {
    model = load_or_fit_model(c, corpus, m, &fitted);
    sc.policy = sim::HawkesGuided{std::make_shared<hawkes::HawkesModel>(*model), c.hawkes_llm_override};
  } else {
    throw InputError("unknown policy '" + a.policy + "'");
  }
  sc.validate();
  const sim::TriggerPlan plan = sim::select_triggers(corpus, h0, c.start, c.trigger_ratio, c.start, c.end);

  std::unique_ptr<agents::AgentPolicy> policy;
  agents::LlmPolicy* llm = nullptr;
  if (a.agent == "stub") {
    policy = std::make_unique<agents::StubPolicy>(agents::calibrate_stub(corpus, h0, c.start, c.seed));
  } else if (a.agent == "llm") {
    const auto cfg = llm_config(c);
    const char* key = std::getenv(cfg.api_key_env.c_str());
    if (!key || !*key) throw InputError("environment variable " + cfg.api_key_env + " is not set");
    auto tmpl = agents::PromptTemplate::standard();
    if (c.llm.contains("prompt_template")) {
      const fs::path tp = fs::path(c.llm["prompt_template"].get<std::string>());
      const fs::path resolved = tp.is_absolute() ? tp : c.path.parent_path() / tp;
      m.input(resolved);
      tmpl = agents::PromptTemplate::from_file(resolved.string());
    }
    auto p = std::make_unique<agents::LlmPolicy>(cfg, tmpl, agents::make_http_transport(cfg));
    llm = p.get();
    policy = std::move(p);
    m.extra()["llm_model"] = cfg.model_name;
  } else {
    throw InputError("unknown agent '" + a.agent + "'");
  }

  std::optional<std::string> sim_error;
  guarded(m, a.out, [&] {
    const sim::SimResult r = sim::run(sc, corpus, *policy, plan);
    fs::create_directories(a.out);
    write_file(fs::path(a.out) / "sim.jsonl", to_jsonl(r.log));
    m.output(fs::path(a.out) / "sim.jsonl");
    if (fitted) {
      write_file(fs::path(a.out) / "model.json", hawkes::model_to_json(*model));
      m.output(fs::path(a.out) / "model.json");
    }
    m.extra()["triggers"] = trigger_names(plan, reg);
    const auto& k = r.counters;
    m.counters()["events"] = r.log.size();
    m.counters()["organic_events"] = k.organic_events;
    m.counters()["trigger_events"] = k.trigger_events;
    m.counters()["wakes"] = k.wakes;
    m.counters()["decisions"] = k.decisions;
    m.counters()["truncated_actions"] = k.truncated_actions;
    m.counters()["dropped_recipients"] = k.dropped_recipients;
    m.counters()["dropped_actions"] = k.dropped_actions;
    m.counters()["clamped_next_checks"] = k.clamped_next_checks;
    if (llm) {
      m.counters()["llm_calls"] = llm->counters().calls.load();
      m.counters()["llm_retries"] = llm->counters().retries.load();
      m.counters()["llm_repairs"] = llm->counters().repairs.load();
    }
    if (r.error) throw ComputationError("simulation aborted: " + *r.error);
  });
  return 0;
}

struct EvaluateArgs {
  std::string sim, gt, sim_format = "jsonl", gt_format = "jsonl", triggers, out;
  std::vector<std::string> window;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const EventLog sim_raw = ingest(a.sim, parse_format(a.sim_format));
  const EventLog gt_raw = ingest(a.gt, parse_format(a.gt_format));
  const AgentRegistry reg = merged_registry(sim_raw.registry(), gt_raw.registry());
  const EventLog sim = reindex(sim_raw, reg);
  const EventLog gt = reindex(gt_raw, reg);

  metrics::TimeWindow w;
  if (!a.window.empty()) {
    const auto [t0, t1] = parse_window(a.window);
    w = {t0, t1};
  } else {
    if (sim.empty()) throw InputError("simulated log is empty; pass --window");
    w = {day_start(sim.events().front().timestamp), day_start(sim.events().back().timestamp) + kSecondsPerDay};
  }
  if (window(gt, w.start, w.end).empty()) throw InputError("window mismatch: ground truth has no events in the window");

  std::vector<AgentIndex> triggers;
  Manifest m("evaluate");
  m.input(a.sim);
  m.input(a.gt);
  if (!a.triggers.empty()) {
    m.input(a.triggers);
    json tj;
    try {
      tj = json::parse(read_file(a.triggers));
      for (const auto& name : tj.at("triggers")) {
        const auto idx = reg.find(name.get<std::string>());
        if (!idx) throw InputError("unknown trigger agent " + name.get<std::string>());
        triggers.push_back(*idx);
      }
    } catch (const json::exception& e) {
      throw InputError("triggers file: " + std::string(e.what()));
    }
  }
  m.config() = {{"sim", a.sim}, {"gt", a.gt}, {"window", {w.start, w.end}}, {"triggers", a.triggers}};
  guarded(m, a.out, [&] {
    const auto report = metrics::evaluate_all(sim, gt, triggers, w);
    fs::create_directories(a.out);
    write_file(fs::path(a.out) / "report.json", metrics::report_to_json(report));
    write_file(fs::path(a.out) / "report.csv", metrics::report_to_csv(report));
    m.output(fs::path(a.out) / "report.json");
    m.output(fs::path(a.out) / "report.csv");
    std::size_t flagged = 0, skipped = 0;
    for (const auto& e : report.entries) {
      flagged += !e.flags.empty();
      skipped += e.skipped.has_value();
      std::cout << std::left << std::setw(10) << e.name << ' '
                << (e.value ? std::to_string(*e.value) : "skipped: " + e.skipped.value_or("")) << '\n';
    }
    m.counters()["flagged_metrics"] = flagged;
    m.counters()["skipped_metrics"] = skipped;
  });
  return 0;
}

struct CompareArgs {
  std::vector<std::string> reports, names;
  std::string out;
};

int cmd_compare(const CompareArgs& a) {
  if (a.reports.empty()) throw InputError("compare needs at least one report");
  if (!a.names.empty() && a.names.size() != a.reports.size()) throw InputError("--names must match the report count");
  const auto& names = metrics::metric_names();
  Eigen::MatrixXd scores(static_cast<Eigen::Index>(a.reports.size()), static_cast<Eigen::Index>(names.size()));
  std::vector<metrics::Category> cats(names.size());
  std::vector<bool> higher(names.size());
  Manifest m("compare");
  for (std::size_t r = 0; r < a.reports.size(); ++r) {
    m.input(a.reports[r]);
    const auto rep = metrics::report_from_json(read_file(a.reports[r]));
    for (std::size_t k = 0; k < names.size(); ++k) {
      const auto* e = rep.find(names[k]);
      if (!e) throw InputError(a.reports[r] + " lacks metric " + names[k]);
      cats[k] = e->category;
      higher[k] = e->higher_is_better;
      scores(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
          e->value ? *e->value : std::numeric_limits<double>::quiet_NaN();
    }
  }
  const auto settings = a.names.empty() ? a.reports : a.names;
  m.config() = {{"reports", a.reports}, {"names", settings}};
  guarded(m, a.out, [&] {
    const auto res = metrics::regret(scores, cats, higher);
    json j;
    j["settings"] = settings;
    json cn = json::array();
    for (auto c : res.categories) cn.push_back(metrics::category_name(c));
    j["categories"] = cn;
    json rows = json::array();
    std::ostringstream csv;
    csv << "setting,category,regret\n" << std::setprecision(17);
    for (Eigen::Index s = 0; s < res.regret.rows(); ++s) {
      json row = json::array();
      for (Eigen::Index c = 0; c < res.regret.cols(); ++c) {
        row.push_back(res.regret(s, c));
        csv << settings[static_cast<std::size_t>(s)] << ',' << metrics::category_name(res.categories[static_cast<std::size_t>(c)])
            << ',' << res.regret(s, c) << '\n';
      }
      rows.push_back(row);
    }
    j["regret"] = rows;
    j["flags"] = res.flags;
    fs::create_directories(a.out);
    write_file(fs::path(a.out) / "regret.json", j.dump(2) + "\n");
    write_file(fs::path(a.out) / "regret.csv", csv.str());
    m.output(fs::path(a.out) / "regret.json");
    m.output(fs::path(a.out) / "regret.csv");
    std::cout << csv.str();
  });
  return 0;
}

struct BaselineArgs {
  std::string kind, config, out;
  std::optional<std::uint64_t> seed;
};

int cmd_baseline(const BaselineArgs& a) {
  RunConfig c = load_config(a.config);
  if (a.seed) c.seed = *a.seed;
  const EventLog corpus = ingest(c.corpus, c.format);
  Manifest m("baseline");
  m.input(a.config);
  m.input(c.corpus);
  m.config() = c.raw;
  m.config()["kind"] = a.kind;
  m.seed(c.seed);
  const Timestamp h0 = c.start - c.history_days * kSecondsPerDay;

  if (a.kind == "rewire") {
    baselines::RewireConfig rc;
    rc.seed = c.seed;
    try {
      if (c.rewire.contains("n_swaps")) rc.n_swaps = c.rewire["n_swaps"].get<std::size_t>();
      rc.day_stratified = c.rewire.value("day_stratified", true);
    } catch (const json::exception& e) {
      throw InputError(std::string("config rewire block: ") + e.what());
    }
    guarded(m, a.out, [&] {
      const auto r = baselines::rewire_degree_preserving(corpus, c.start, c.end, rc);
      fs::create_directories(a.out);
      write_file(fs::path(a.out) / "sim.jsonl", to_jsonl(r.log));
      m.output(fs::path(a.out) / "sim.jsonl");
      m.counters() = {{"events", r.log.size()}, {"accepted_swaps", r.accepted_swaps}, {"rejected_swaps", r.rejected_swaps}};
    });
    return 0;
  }
  if (a.kind != "hawkes") throw InputError("unknown baseline kind '" + a.kind + "'");

  bool fitted = false;
  const hawkes::HawkesModel model = load_or_fit_model(c, corpus, m, &fitted);
  const sim::TriggerPlan plan = sim::select_triggers(corpus, h0, c.start, c.trigger_ratio, c.start, c.end);
  const EventLog history = window(corpus, h0, c.start);
  guarded(m, a.out, [&] {
    const auto r = hawkes::simulate_pure_hawkes(model, c.start, c.end, plan.scheduled_events, plan.trigger_agents,
                                                history, hawkes::ContactTable::from_log(history), c.seed);
    fs::create_directories(a.out);
    write_file(fs::path(a.out) / "sim.jsonl", to_jsonl(r.log));
    m.output(fs::path(a.out) / "sim.jsonl");
    if (fitted) {
      write_file(fs::path(a.out) / "model.json", hawkes::model_to_json(model));
      m.output(fs::path(a.out) / "model.json");
    }
    m.extra()["triggers"] = trigger_names(plan, corpus.registry());
    m.counters()["events"] = r.log.size();
    m.counters()["uniform_fallbacks"] = r.uniform_fallbacks;
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal network simulation toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  StatsArgs stats;
  auto* s = app.add_subcommand("stats", "Dataset summary and network statistics");
  s->add_option("input", stats.input, "Event log")->required();
  s->add_option("--format", stats.format, "jsonl or csv");
  s->add_option("--out", stats.out, "Output directory for stats.json");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Fit a periodic Hawkes model by maximum likelihood");
  f->add_option("input", fit.input, "Event log")->required();
  f->add_option("--format", fit.format, "jsonl or csv");
  f->add_option("--window", fit.window, "Fitting window: start end")->expected(2)->required();
  f->add_flag("!--diagonal-only,--full", fit.full, "Fit cross-excitation between agents too");
  f->add_option("--beta", fit.beta, "Decay rate per hour (default from median inter-event gap)");
  f->add_option("--max-iters", fit.max_iters);
  f->add_option("--tolerance", fit.tolerance, "Relative log-likelihood change to stop");
  f->add_option("--out", fit.out)->required();

  SimulateArgs simu;
  auto* sm = app.add_subcommand("simulate", "Run the agent simulation");
  sm->add_option("--config", simu.config, "Run configuration (JSON)")->required();
  sm->add_option("--policy", simu.policy)->check(CLI::IsMember({"periodic", "llm-predicted", "hod", "hawkes"}));
  sm->add_option("--agent", simu.agent)->check(CLI::IsMember({"stub", "llm"}));
  sm->add_option("--seed", simu.seed, "Overrides the config seed");
  sm->add_option("--out", simu.out)->required();

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Score a simulated log against ground truth");
  e->add_option("sim", ev.sim)->required();
  e->add_option("gt", ev.gt)->required();
  e->add_option("--sim-format", ev.sim_format);
  e->add_option("--gt-format", ev.gt_format);
  e->add_option("--window", ev.window, "Evaluation window: start end")->expected(2);
  e->add_option("--triggers", ev.triggers, "JSON file with a \"triggers\" name list (e.g. a simulate manifest)");
  e->add_option("--out", ev.out)->required();

  CompareArgs cmp;
  auto* c = app.add_subcommand("compare", "Per-category regret across reports");
  c->add_option("reports", cmp.reports)->required();
  c->add_option("--names", cmp.names, "Setting names, one per report");
  c->add_option("--out", cmp.out)->required();

  BaselineArgs base;
  auto* b = app.add_subcommand("baseline", "Statistical reference generators");
  b->add_option("--kind", base.kind)->required()->check(CLI::IsMember({"hawkes", "rewire"}));
  b->add_option("--config", base.config)->required();
  b->add_option("--seed", base.seed);
  b->add_option("--out", base.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (s->parsed()) return cmd_stats(stats);
    if (f->parsed()) return cmd_fit(fit);
    if (sm->parsed()) return cmd_simulate(simu);
    if (e->parsed()) return cmd_evaluate(ev);
    if (c->parsed()) return cmd_compare(cmp);
    if (b->parsed()) return cmd_baseline(base);
  } catch (const InputError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 2;
}
