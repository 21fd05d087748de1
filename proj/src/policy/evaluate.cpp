#include "mci/evaluate.hpp"

namespace mci {

ActMode default_mode(const Policy& policy) {
  return policy.kind() == PolicyKind::Learned ? ActMode::Argmax : ActMode::Sample;
}

EpisodeResult run_episode(const Policy& policy, std::shared_ptr<const Scenario> scenario, Rng& rng, ActMode mode) {
  MciEnv env(policy.caps_for_scenario(*scenario));
  env.reset(std::move(scenario));
  while (!env.done()) {
    const Decision d = policy.act(env.state(), env.observation(), rng, mode);
    env.step(d.action);
  }
  return {env.state(), env.episode_reward(), env.decisions()};
}

EvalSummary evaluate(const Policy& policy, const std::vector<std::shared_ptr<const Scenario>>& scenarios, int episodes,
                     std::uint64_t seed) {
  return evaluate(policy, scenarios, episodes, seed, default_mode(policy));
}

EvalSummary evaluate(const Policy& policy, const std::vector<std::shared_ptr<const Scenario>>& scenarios, int episodes,
                     std::uint64_t seed, ActMode mode) {
  EvalSummary out;
  out.policy = policy.name();
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    for (int k = 0; k < episodes; ++k) {
      Rng rng(splitmix64(seed + i * static_cast<std::uint64_t>(episodes) + static_cast<std::uint64_t>(k)));
      const EpisodeResult r = run_episode(policy, scenarios[i], rng, mode);
      const OutcomeReport report = outcome_report(r.final_state.event_log);
      out.mean_reward += r.total_reward;
      out.mortality_rate += report.mortality_rate;
      out.match_rate += report.match_rate;
      out.completion_time += report.completion_time;
      out.episode_rewards.push_back(r.total_reward);
      out.episode_mortality.push_back(report.mortality_rate);
      ++out.episodes;
    }
  }
  if (out.episodes > 0) {
    out.mean_reward /= out.episodes;
    out.mortality_rate /= out.episodes;
    out.match_rate /= out.episodes;
    out.completion_time /= out.episodes;
  }
  return out;
}

}  // namespace mci
