// mci: scenario generation, policy rollouts, training, evaluation, replay and
// the HTTP service.
#include "mci/error.hpp"
#include "mci/evaluate.hpp"
#include "mci/metrics.hpp"
#include "mci/policy_io.hpp"
#include "mci/ppo.hpp"
#include "mci/presets.hpp"
#include "mci/replay.hpp"
#include "mci/scenario_io.hpp"
#include "mci/service/http_server.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifndef MCI_VERSION
#define MCI_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mci;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_parent(const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
}

void write_file(const fs::path& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Storage, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Storage, "write failed for " + path.string());
}

void write_manifest(const fs::path& out, const std::string& command, const json& config, std::uint64_t seed,
                    const std::vector<fs::path>& outputs) {
  json files = json::array();
  for (const auto& p : outputs) files.push_back(p.string());
  const json manifest = {{"tool", "mci"},       {"version", MCI_VERSION}, {"command", command},
                         {"config", config},    {"seed", seed},           {"outputs", files}};
  write_file(fs::path(out.string() + ".manifest.json"), manifest.dump(2) + "\n");
}

GeneratorConfig family_config(const std::string& name, std::uint64_t seed) {
  auto c = preset_config(name, seed);
  if (!c) throw Error(ErrorCode::Validation, "unknown preset '" + name + "' (standard, complex, small)");
  return *c;
}

Scenario family_scenario(const std::string& name, std::uint64_t seed) {
  auto s = preset_scenario(name, seed);
  if (!s) throw Error(ErrorCode::Validation, "unknown preset '" + name + "' (standard, complex, small)");
  return std::move(*s);
}

struct GenArgs {
  std::string preset;
  int patients = 0, hospitals = 0, fleet = 0, horizon = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int gen_scenario(const GenArgs& a) {
  Scenario s;
  if (a.preset == "standard" || a.preset == "complex") {
    if (a.patients || a.hospitals || a.fleet || a.horizon)
      throw Error(ErrorCode::Validation, "--patients/--hospitals/--fleet/--horizon cannot override " + a.preset);
    s = family_scenario(a.preset, a.seed);
  } else {
    GeneratorConfig c = a.preset.empty() ? GeneratorConfig{} : family_config(a.preset, a.seed);
    c.seed = a.seed;
    if (a.patients) c.patient_count = a.patients;
    if (a.hospitals) c.hospital_count = a.hospitals;
    if (a.fleet) c.fleet_size_max = a.fleet;
    if (a.horizon) c.horizon = a.horizon;
    s = generate_scenario(c);
  }
  ensure_parent(a.out);
  save_scenario(s, a.out);
  write_manifest(a.out, "gen-scenario",
                 {{"preset", a.preset}, {"patients", a.patients}, {"hospitals", a.hospitals}, {"fleet", a.fleet},
                  {"horizon", a.horizon}},
                 a.seed, {a.out});
  std::cout << "wrote " << a.out << " (" << s.patients.size() << " patients, " << s.hospitals.size()
            << " hospitals)\n";
  return 0;
}

struct RunArgs {
  std::string scenario, preset = "standard", policy = "greedy", out, report;
  std::uint64_t seed = 0, scenario_seed = 0;
};

int run(const RunArgs& a) {
  auto scenario = std::make_shared<const Scenario>(a.scenario.empty() ? family_scenario(a.preset, a.scenario_seed)
                                                                      : load_scenario(a.scenario));
  const Policy policy = resolve_policy(a.policy);
  Rng rng(a.seed);
  const EpisodeResult r = run_episode(policy, scenario, rng, default_mode(policy));
  const OutcomeReport report = outcome_report(r.final_state.event_log);
  write_file(a.out, serialize_log(r.final_state.event_log));
  std::vector<fs::path> outputs = {a.out};
  if (!a.report.empty()) {
    write_file(a.report, report_to_json(report).dump(2) + "\n");
    outputs.push_back(a.report);
  }
  write_manifest(a.out, "run",
                 {{"scenario", a.scenario}, {"preset", a.scenario.empty() ? a.preset : ""},
                  {"scenario_seed", a.scenario_seed}, {"policy", a.policy}, {"scenario_id", scenario->id}},
                 a.seed, outputs);
  std::cout << std::fixed << std::setprecision(2) << policy.name() << " on " << scenario->id << ": reward "
            << r.total_reward << ", mortality " << report.mortality_rate << "%, match " << report.match_rate
            << "%, completion " << report.completion_time << " min\n";
  return 0;
}

struct TrainArgs {
  std::string family = "small", out, curve;
  std::uint64_t seed = 0;
  PpoConfig ppo;
  bool quiet = false;
};

int train(const TrainArgs& a) {
  const GeneratorConfig family = family_config(a.family, 0);
  const ObservationCaps caps{family.patient_count, family.hospital_count};
  const TrainResult r = train_ppo(family, caps, a.ppo, a.seed, [&](const CurvePoint& p) {
    if (!a.quiet) std::cerr << "iter " << p.iteration << " steps " << p.steps << " mean_reward " << p.mean_reward << "\n";
  });
  ensure_parent(a.out);
  save_policy(r.spec, a.out);
  std::vector<fs::path> outputs = {a.out};
  if (!a.curve.empty()) {
    write_file(a.curve, curve_to_csv(r.curve));
    outputs.push_back(a.curve);
  }
  const PpoConfig& c = a.ppo;
  write_manifest(a.out, "train",
                 {{"family", a.family},       {"steps", c.total_steps},     {"learning_rate", c.learning_rate},
                  {"epochs", c.epochs},       {"minibatch", c.minibatch},   {"clip", c.clip},
                  {"gamma", c.gamma},         {"gae_lambda", c.gae_lambda}, {"entropy_coef", c.entropy_coef},
                  {"value_coef", c.value_coef}, {"max_grad_norm", c.max_grad_norm},
                  {"rollout_steps", c.rollout_steps}, {"envs", c.parallel_envs}, {"hidden", c.hidden},
                  {"reward_scale", c.reward_scale}},
                 a.seed, outputs);
  std::cout << "wrote " << a.out << " after " << (r.curve.empty() ? 0 : r.curve.back().steps) << " steps";
  if (!r.curve.empty()) std::cout << ", final mean episode reward " << r.curve.back().mean_reward;
  std::cout << "\n";
  return 0;
}

struct EvalArgs {
  std::string policies = "random,greedy", preset = "standard", out;
  int seeds = 100, episodes = 1;
  std::uint64_t seed = 0, scenario_seed = 1000;
};

int eval(const EvalArgs& a) {
  if (a.seeds < 1 || a.episodes < 1) throw Error(ErrorCode::Validation, "--seeds and --episodes must be >= 1");
  std::vector<std::shared_ptr<const Scenario>> scenarios;
  for (int i = 0; i < a.seeds; ++i)
    scenarios.push_back(std::make_shared<const Scenario>(family_scenario(a.preset, a.scenario_seed + i)));

  std::vector<std::string> names;
  std::stringstream list(a.policies);
  for (std::string item; std::getline(list, item, ',');)
    if (!item.empty()) names.push_back(item);
  if (names.empty()) throw Error(ErrorCode::Validation, "--policies is empty");

  json rows = json::array();
  std::cout << std::left << std::setw(24) << "policy" << std::right << std::setw(10) << "episodes" << std::setw(16)
            << "completion_min" << std::setw(13) << "mortality_%" << std::setw(10) << "match_%" << std::setw(14)
            << "mean_reward" << "\n";
  for (const auto& name : names) {
    const EvalSummary s = evaluate(resolve_policy(name), scenarios, a.episodes, a.seed);
    std::cout << std::left << std::setw(24) << name << std::right << std::setw(10) << s.episodes << std::fixed
              << std::setprecision(2) << std::setw(16) << s.completion_time << std::setw(13) << s.mortality_rate
              << std::setw(10) << s.match_rate << std::setw(14) << s.mean_reward << "\n";
    rows.push_back({{"policy", name},
                    {"episodes", s.episodes},
                    {"completion_time", s.completion_time},
                    {"mortality_rate", s.mortality_rate},
                    {"match_rate", s.match_rate},
                    {"mean_reward", s.mean_reward}});
  }
  if (!a.out.empty()) {
    write_file(a.out, json({{"preset", a.preset}, {"rows", rows}}).dump(2) + "\n");
    write_manifest(a.out, "eval",
                   {{"policies", a.policies}, {"preset", a.preset}, {"seeds", a.seeds}, {"episodes", a.episodes},
                    {"scenario_seed", a.scenario_seed}},
                   a.seed, {a.out});
  }
  return 0;
}

struct ReplayArgs {
  std::string scenario, log, out, csv;
};

int replay_log(const ReplayArgs& a) {
  auto scenario = std::make_shared<const Scenario>(load_scenario(a.scenario));
  const std::vector<Event> log = parse_log(read_file(a.log));
  const SimState state = replay(scenario, log, log.empty() ? 0 : log.back().time);
  if (serialize_log(state.event_log) != serialize_log(log))
    throw Error(ErrorCode::MalformedLog, "replay does not reproduce " + a.log);
  const OutcomeReport report = outcome_report(state.event_log);
  const std::string text = report_to_json(report).dump(2) + "\n";
  std::vector<fs::path> outputs;
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_file(a.out, text);
    outputs.push_back(a.out);
  }
  if (!a.csv.empty()) {
    write_file(a.csv, report_to_csv(report));
    outputs.push_back(a.csv);
  }
  if (!a.out.empty()) write_manifest(a.out, "replay", {{"scenario", a.scenario}, {"log", a.log}}, scenario->seed, outputs);
  return 0;
}

struct ServeArgs {
  std::string host = "127.0.0.1", archive_dir = "archive";
  int port = 8080;
};

int serve(const ServeArgs& a) {
  service::SessionManager manager(a.archive_dir);
  service::HttpServer server(manager);
  std::cerr << "listening on " << a.host << ":" << a.port << "\n";
  server.listen(a.host, a.port);
  return 0;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Storage:
    case ErrorCode::Divergence:
    case ErrorCode::Generation: return kExitRuntime;
    default: return kExitValidation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mass-casualty incident dispatch simulator"};
  app.set_version_flag("--version", MCI_VERSION);
  app.set_config("--config", "", "TOML/INI file with flag values; command-line flags take precedence");
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-scenario", "Generate a scenario file");
  gen_cmd->add_option("--preset", gen.preset, "standard, complex or small (default: generator defaults)");
  gen_cmd->add_option("--patients", gen.patients, "Patient count");
  gen_cmd->add_option("--hospitals", gen.hospitals, "Hospital count");
  gen_cmd->add_option("--fleet", gen.fleet, "Maximum ambulance fleet");
  gen_cmd->add_option("--horizon", gen.horizon, "Session horizon in minutes");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--out", gen.out, "Output path")->required();

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Roll out one policy on one scenario");
  run_cmd->add_option("--scenario", run_args.scenario, "Scenario file (default: a preset)");
  run_cmd->add_option("--preset", run_args.preset, "Preset used without --scenario")->capture_default_str();
  run_cmd->add_option("--scenario-seed", run_args.scenario_seed, "Preset seed");
  run_cmd->add_option("--policy", run_args.policy, "random, greedy or a policy file")->capture_default_str();
  run_cmd->add_option("--seed", run_args.seed, "Policy sampling seed");
  run_cmd->add_option("--out", run_args.out, "Event log output (NDJSON)")->required();
  run_cmd->add_option("--report", run_args.report, "Outcome report output (JSON)");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a PPO policy");
  PpoConfig& ppo = train_args.ppo;
  train_cmd->add_option("--family", train_args.family, "Scenario family preset")->capture_default_str();
  train_cmd->add_option("--steps", ppo.total_steps, "Environment steps")->capture_default_str();
  train_cmd->add_option("--seed", train_args.seed, "Training seed");
  train_cmd->add_option("--learning-rate", ppo.learning_rate)->capture_default_str();
  train_cmd->add_option("--epochs", ppo.epochs)->capture_default_str();
  train_cmd->add_option("--minibatch", ppo.minibatch)->capture_default_str();
  train_cmd->add_option("--clip", ppo.clip)->capture_default_str();
  train_cmd->add_option("--gamma", ppo.gamma)->capture_default_str();
  train_cmd->add_option("--gae-lambda", ppo.gae_lambda)->capture_default_str();
  train_cmd->add_option("--entropy-coef", ppo.entropy_coef)->capture_default_str();
  train_cmd->add_option("--value-coef", ppo.value_coef)->capture_default_str();
  train_cmd->add_option("--max-grad-norm", ppo.max_grad_norm)->capture_default_str();
  train_cmd->add_option("--rollout-steps", ppo.rollout_steps)->capture_default_str();
  train_cmd->add_option("--envs", ppo.parallel_envs)->capture_default_str();
  train_cmd->add_option("--hidden", ppo.hidden)->capture_default_str();
  train_cmd->add_option("--reward-scale", ppo.reward_scale)->capture_default_str();
  train_cmd->add_option("--out", train_args.out, "Policy output path")->required();
  train_cmd->add_option("--curve", train_args.curve, "Training curve CSV");
  train_cmd->add_flag("--quiet", train_args.quiet, "No per-iteration progress");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Compare policies across seeds");
  eval_cmd->add_option("--policies", eval_args.policies, "Comma-separated policies")->capture_default_str();
  eval_cmd->add_option("--preset", eval_args.preset, "Scenario family")->capture_default_str();
  eval_cmd->add_option("--seeds", eval_args.seeds, "Number of scenarios")->capture_default_str();
  eval_cmd->add_option("--scenario-seed", eval_args.scenario_seed, "First scenario seed")->capture_default_str();
  eval_cmd->add_option("--episodes", eval_args.episodes, "Rollouts per scenario")->capture_default_str();
  eval_cmd->add_option("--seed", eval_args.seed, "Rollout seed");
  eval_cmd->add_option("--out", eval_args.out, "Summary output (JSON)");

  ReplayArgs replay_args;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run an event log and report outcomes");
  replay_cmd->add_option("--scenario", replay_args.scenario, "Scenario file")->required();
  replay_cmd->add_option("--log", replay_args.log, "Event log (NDJSON)")->required();
  replay_cmd->add_option("--out", replay_args.out, "Report output (JSON, default stdout)");
  replay_cmd->add_option("--csv", replay_args.csv, "Report output (CSV)");

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP session service");
  serve_cmd->add_option("--host", serve_args.host)->capture_default_str();
  serve_cmd->add_option("--port", serve_args.port)->capture_default_str();
  serve_cmd->add_option("--archive-dir", serve_args.archive_dir)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (gen_cmd->parsed()) return gen_scenario(gen);
    if (run_cmd->parsed()) return run(run_args);
    if (train_cmd->parsed()) return train(train_args);
    if (eval_cmd->parsed()) return eval(eval_args);
    if (replay_cmd->parsed()) return replay_log(replay_args);
    if (serve_cmd->parsed()) return serve(serve_args);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
