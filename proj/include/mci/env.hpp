// Episode wrapper used by training and evaluation. Each step either assigns
// one admissible pair or waits one minute; minutes in which nothing is
// admissible are skipped automatically (waiting is the only legal move).
#pragma once

#include "mci/observation.hpp"
#include "mci/policy.hpp"
#include "mci/reward.hpp"

#include <memory>

namespace mci {

class MciEnv {
 public:
  explicit MciEnv(ObservationCaps caps) : caps_(caps) {}

  void reset(std::shared_ptr<const Scenario> scenario);

  struct StepResult {
    double reward = 0.0;
    bool done = false;
  };

  /// Throws Error(InvalidArgument) for an inadmissible assignment.
  StepResult step(const Action& action);

  const SimState& state() const { return state_; }
  const EncodedObservation& observation() const { return obs_; }
  const ObservationCaps& caps() const { return caps_; }
  bool done() const { return state_.terminal; }
  double episode_reward() const { return episode_reward_; }
  int decisions() const { return decisions_; }

 private:
  double tick();
  double skip_forced();

  ObservationCaps caps_;
  SimState state_;
  EncodedObservation obs_;
  double episode_reward_ = 0.0;
  int decisions_ = 0;
};

}  // namespace mci
