#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "doctest.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kFixtures = TNSIM_FIXTURES;
const fs::path kWork = fs::path(TNSIM_WORKDIR) / "cli";

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

int tnsim(const std::string& args) {
  const std::string cmd = std::string("\"") + TNSIM_CLI + "\" " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

fs::path fresh(const std::string& name) {
  const auto p = kWork / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(tnsim("") == 2);
  CHECK(tnsim("frobnicate") == 2);
  CHECK(tnsim("stats") == 2);
  CHECK(tnsim("stats " + q(kFixtures / "missing.jsonl")) == 2);
  CHECK(tnsim("simulate --config " + q(kFixtures / "mini_config.json") + " --policy sometimes --out x") == 2);
}

TEST_CASE("stats agree across formats and with the golden values") {
  const auto a = fresh("stats_jsonl"), b = fresh("stats_csv");
  REQUIRE(tnsim("stats " + q(kFixtures / "mini_corpus.jsonl") + " --out " + q(a)) == 0);
  REQUIRE(tnsim("stats " + q(kFixtures / "mini_corpus.csv") + " --format csv --out " + q(b)) == 0);
  const auto ja = load(a / "stats.json"), jb = load(b / "stats.json");
  CHECK(ja == jb);
  const auto golden = load(kFixtures / "mini_corpus_golden_stats.json");
  for (const char* key : {"r24", "weekend_ratio", "burstiness_median", "density", "transitivity",
                          "global_efficiency", "reciprocity", "median_events_per_agent"}) {
    CAPTURE(key);
    CHECK(ja[key].get<double>() == doctest::Approx(golden[key].get<double>()).epsilon(1e-12));
  }
  CHECK(ja["total_events"] == golden["total_events"]);
}

TEST_CASE("a malformed corpus is an input error and writes nothing") {
  const auto dir = fresh("bad_input");
  write(dir / "bad.jsonl", "{\"id\": 1}\n");
  CHECK(tnsim("stats " + q(dir / "bad.jsonl") + " --out " + q(dir / "out")) == 2);
  CHECK_FALSE(fs::exists(dir / "out" / "stats.json"));
}

TEST_CASE("api keys in config are rejected") {
  const auto dir = fresh("api_key");
  auto cfg = load(kFixtures / "mini_config.json");
  cfg["corpus"] = (kFixtures / "mini_corpus.jsonl").string();
  cfg["llm"] = {{"base_url", "http://127.0.0.1:9"}, {"model_name", "m"}, {"api_key", "sk-secret"}};
  write(dir / "config.json", cfg.dump());
  CHECK(tnsim("simulate --config " + q(dir / "config.json") + " --agent llm --out " + q(dir / "out")) == 2);
}

TEST_CASE("llm agent without the key variable fails before running") {
  const auto dir = fresh("no_key");
  auto cfg = load(kFixtures / "mini_config.json");
  cfg["corpus"] = (kFixtures / "mini_corpus.jsonl").string();
  cfg["llm"] = {{"base_url", "http://127.0.0.1:9"}, {"model_name", "m"}, {"api_key_env", "TNSIM_UNSET_KEY_VAR"}};
  write(dir / "config.json", cfg.dump());
  ::unsetenv("TNSIM_UNSET_KEY_VAR");
  CHECK(tnsim("simulate --config " + q(dir / "config.json") + " --agent llm --out " + q(dir / "out")) == 2);
}

TEST_CASE("simulate, evaluate and compare end to end") {
  const auto dir = fresh("pipeline");
  const auto config = kFixtures / "mini_config.json";
  REQUIRE(tnsim("simulate --config " + q(config) + " --policy periodic --agent stub --out " + q(dir / "periodic")) ==
          0);
  REQUIRE(tnsim("simulate --config " + q(config) + " --policy hod --agent stub --out " + q(dir / "hod")) == 0);
  const auto manifest = load(dir / "periodic" / "manifest.json");
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["triggers"] == json::array({"alice"}));
  CHECK(manifest["seed"] == 42);
  CHECK(slurp(dir / "periodic" / "manifest.json").find("sk-") == std::string::npos);

  for (const char* run : {"periodic", "hod"}) {
    REQUIRE(tnsim("evaluate " + q(dir / run / "sim.jsonl") + " " + q(kFixtures / "mini_corpus.jsonl") +
                  " --triggers " + q(dir / run / "manifest.json") + " --out " + q(dir / run / "eval")) == 0);
    const auto report = load(dir / run / "eval" / "report.json");
    CHECK(report["metrics"].size() == 15);
    CHECK(fs::exists(dir / run / "eval" / "report.csv"));
  }
  REQUIRE(tnsim("compare " + q(dir / "periodic" / "eval" / "report.json") + " " +
                q(dir / "hod" / "eval" / "report.json") + " --names periodic hod --out " + q(dir / "cmp")) == 0);
  const auto regret = load(dir / "cmp" / "regret.json");
  CHECK(regret["settings"] == json::array({"periodic", "hod"}));
}

TEST_CASE("evaluate reports a window mismatch as an input error") {
  const auto dir = fresh("mismatch");
  CHECK(tnsim("evaluate " + q(kFixtures / "mini_corpus.jsonl") + " " + q(kFixtures / "mini_corpus.jsonl") +
              " --window 2010-01-01 2010-01-08 --out " + q(dir)) == 2);
}

TEST_CASE("fit and both baselines") {
  const auto dir = fresh("fit");
  REQUIRE(tnsim("fit " + q(kFixtures / "mini_corpus.jsonl") + " --window 2001-09-20 2001-10-22 --out " +
                q(dir / "model")) == 0);
  const auto model = load(dir / "model" / "model.json");
  CHECK(model["agents"].size() == 10);
  for (const char* kind : {"hawkes", "rewire"}) {
    const auto out = dir / kind;
    REQUIRE(tnsim(std::string("baseline --kind ") + kind + " --config " + q(kFixtures / "mini_config.json") +
                  " --out " + q(out)) == 0);
    CHECK(fs::exists(out / "sim.jsonl"));
    CHECK(load(out / "manifest.json")["status"] == "ok");
  }
}
