#pragma once

#include "mci/env.hpp"
#include "mci/metrics.hpp"
#include "mci/policy.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace mci {

struct EpisodeResult {
  SimState final_state;
  double total_reward = 0.0;
  int decisions = 0;
};

/// Closed-loop rollout until terminal; the policy may act several times per minute.
EpisodeResult run_episode(const Policy& policy, std::shared_ptr<const Scenario> scenario, Rng& rng, ActMode mode);

/// Argmax for learned policies, sampling otherwise.
ActMode default_mode(const Policy& policy);

struct EvalSummary {
  std::string policy;
  int episodes = 0;
  double mean_reward = 0.0;
  double mortality_rate = 0.0;   // percent, mean over episodes
  double match_rate = 0.0;       // percent, mean over episodes
  double completion_time = 0.0;  // minutes, mean over episodes
  std::vector<double> episode_rewards;
  std::vector<double> episode_mortality;
};

/// `episodes` rollouts per scenario; episode k of scenario i draws from
/// Rng(splitmix64(seed + i * episodes + k)).
EvalSummary evaluate(const Policy& policy, const std::vector<std::shared_ptr<const Scenario>>& scenarios,
                     int episodes, std::uint64_t seed);
EvalSummary evaluate(const Policy& policy, const std::vector<std::shared_ptr<const Scenario>>& scenarios,
                     int episodes, std::uint64_t seed, ActMode mode);

}  // namespace mci
