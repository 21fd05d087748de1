#include "mci/env.hpp"
#include "mci/error.hpp"

namespace mci {

void MciEnv::reset(std::shared_ptr<const Scenario> scenario) {
  state_ = init_session(std::move(scenario));
  episode_reward_ = 0.0;
  decisions_ = 0;
  obs_ = encode(state_, caps_);
  episode_reward_ += skip_forced();
}

double MciEnv::tick() {
  const std::vector<PatientState> before = state_.patients;
  const auto events = mci::step(state_, 1);
  return transition_reward(before, state_, events).total;
}

double MciEnv::skip_forced() {
  double reward = 0.0;
  while (!state_.terminal && !obs_.any_action()) {
    reward += tick();
    obs_ = encode(state_, caps_);
  }
  return reward;
}

MciEnv::StepResult MciEnv::step(const Action& action) {
  if (state_.terminal) throw Error(ErrorCode::InvalidArgument, "episode is over");
  StepResult r;
  ++decisions_;
  if (action.is_wait()) {
    r.reward += tick();
  } else {
    const auto p = static_cast<std::size_t>(action.patient_slot);
    const auto h = static_cast<std::size_t>(action.hospital_slot);
    if (p >= state_.patients.size() || h >= state_.hospitals.size())
      throw Error(ErrorCode::InvalidArgument, "action refers to an empty slot");
    const auto outcome = assign_patient(state_, state_.patients[p].id, state_.scenario->hospitals[h].id);
    if (!outcome.ok())
      throw Error(ErrorCode::InvalidArgument, "inadmissible action: " + std::string(to_string(outcome.rejection->reason)));
  }
  obs_ = encode(state_, caps_);
  r.reward += skip_forced();
  r.done = state_.terminal;
  episode_reward_ += r.reward;
  return r;
}

}  // namespace mci
