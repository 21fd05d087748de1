#include "doctest.h"

#include "mci/metrics.hpp"
#include "mci/policy_io.hpp"
#include "mci/replay.hpp"
#include "mci/scenario_io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using namespace mci;
using nlohmann::json;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("mci_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string command = std::string(MCI_CLI_PATH) + " " + args + " > " + (workdir() / "stdout.txt").string() + " 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

}  // namespace

TEST_CASE("generate, run and replay") {
  REQUIRE(run("gen-scenario --patients 60 --seed 7 --out " + path("gen/s60.json")) == 0);
  const Scenario sc = load_scenario(path("gen/s60.json"));
  CHECK(sc.patients.size() == 60);
  CHECK(serialize_scenario(sc) == slurp(path("gen/s60.json")));
  REQUIRE(run("gen-scenario --patients 60 --seed 7 --out " + path("gen/again.json")) == 0);
  CHECK(slurp(path("gen/s60.json")) == slurp(path("gen/again.json")));

  const auto manifest = json::parse(slurp(path("gen/s60.json.manifest.json")));
  for (const char* key : {"tool", "version", "command", "config", "seed", "outputs"}) CHECK(manifest.contains(key));
  CHECK(manifest.at("seed") == 7);

  REQUIRE(run("run --scenario " + path("gen/s60.json") + " --policy greedy --out " + path("run/log.ndjson") + " --report " +
              path("run/report.json")) == 0);
  const auto log = parse_log(slurp(path("run/log.ndjson")));
  CHECK(replay_matches(std::make_shared<const Scenario>(sc), log));

  REQUIRE(run("replay --scenario " + path("gen/s60.json") + " --log " + path("run/log.ndjson") + " --out " +
              path("run/replayed.json") + " --csv " + path("run/replayed.csv")) == 0);
  CHECK(slurp(path("run/report.json")) == slurp(path("run/replayed.json")));
  CHECK(report_from_json(json::parse(slurp(path("run/replayed.json")))) == outcome_report(log));
  CHECK(slurp(path("run/replayed.csv")).rfind("metric,value", 0) == 0);
}

TEST_CASE("eval ranks greedy above random") {
  REQUIRE(run("eval --policies random,greedy --preset standard --seeds 10 --out " + path("eval/summary.json")) == 0);
  const auto j = json::parse(slurp(path("eval/summary.json")));
  std::map<std::string, json> by_name;
  for (const auto& row : j.at("rows")) by_name[row.at("policy")] = row;
  REQUIRE(by_name.count("greedy"));
  REQUIRE(by_name.count("random"));
  CHECK(by_name["greedy"].at("mortality_rate").get<double>() <= by_name["random"].at("mortality_rate").get<double>());
  CHECK(by_name["greedy"].at("mean_reward").get<double>() > by_name["random"].at("mean_reward").get<double>());
  const std::string table = slurp(workdir() / "stdout.txt");
  CHECK(table.find("mortality_%") != std::string::npos);
}

TEST_CASE("train writes a loadable policy and curve") {
  REQUIRE(run("train --family small --steps 512 --rollout-steps 256 --minibatch 64 --epochs 1 --hidden 8 --envs 2 --seed 3 --quiet --out " +
              path("train/p.bin") + " --curve " + path("train/curve.csv")) == 0);
  const PolicySpec spec = load_policy(path("train/p.bin"));
  CHECK(spec.kind == PolicyKind::Learned);
  CHECK(spec.hidden == 8);
  CHECK(slurp(path("train/curve.csv")).rfind("iteration,steps,mean_reward\n", 0) == 0);
  CHECK(fs::exists(path("train/p.bin.manifest.json")));
  CHECK(run("run --preset small --scenario-seed 4 --policy " + path("train/p.bin") + " --out " + path("train/log.ndjson")) == 0);
}

TEST_CASE("exit codes") {
  CHECK(run("") != 0);
  CHECK(run("run --scenario " + path("missing.json") + " --out " + path("x.ndjson")) == 1);
  CHECK(run("gen-scenario --patients 3 --out " + path("few.json")) == 1);
  CHECK(run("eval --policies random,sideways") == 1);
  CHECK(run("no-such-command") == 1);

  std::ofstream(path("bad.ndjson")) << "{\"seq\": 0, \"time\": 0, \"kind\": \"Arrived\"}\n";
  REQUIRE(run("gen-scenario --preset small --seed 1 --out " + path("small.json")) == 0);
  CHECK(run("replay --scenario " + path("small.json") + " --log " + path("bad.ndjson")) == 1);
}
