// Control policies over the per-tick action space: assign one
// (patient, hospital) pair or wait for the next minute.
#pragma once

#include "mci/mlp.hpp"
#include "mci/observation.hpp"
#include "mci/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mci {

enum class PolicyKind { Random, Greedy, Learned };

std::string_view to_string(PolicyKind k);
std::optional<PolicyKind> policy_kind_from_string(std::string_view name);

struct PolicySpec {
  PolicyKind kind = PolicyKind::Random;
  ObservationCaps caps;
  int hidden = 128;
  std::vector<double> parameters;  // actor then critic, see ActorCritic
  double reward_scale = 0.01;      // training-time reward normalisation
  std::uint64_t training_seed = 0;
};

/// Expected flat parameter count for a Learned spec.
std::size_t learned_parameter_count(const ObservationCaps& caps, int hidden);

struct Action {
  int patient_slot = -1;
  int hospital_slot = -1;
  bool is_wait() const { return patient_slot < 0; }
  bool operator==(const Action&) const = default;
};

/// Flat index (patient_slot * max_hospitals + hospital_slot), wait = last.
int action_index(const Action& a, const ObservationCaps& caps);
Action action_from_index(int index, const ObservationCaps& caps);

struct Decision {
  Action action;
  double log_prob = 0.0;
  double value = 0.0;
};

enum class ActMode { Sample, Argmax };

class Policy {
 public:
  static Policy random();
  static Policy greedy();
  /// Throws Error(PolicyLoad) when the parameter blob does not fit the shape.
  static Policy learned(PolicySpec spec);

  PolicyKind kind() const { return spec_.kind; }
  const PolicySpec& spec() const { return spec_; }
  std::string name() const;

  /// Caps this policy needs for a scenario (Learned: its fixed caps).
  ObservationCaps caps_for_scenario(const Scenario& scenario) const;

  /// Random: uniform over admissible pairs plus wait. Greedy: greedy
  /// suggestion for the most urgent, longest-waiting patient that has one.
  /// Learned: masked categorical over pairs plus wait.
  Decision act(const SimState& state, const EncodedObservation& obs, Rng& rng, ActMode mode = ActMode::Sample) const;

  /// Full action distribution of a Learned policy (log-probs, -inf when masked) and value.
  std::pair<Eigen::VectorXd, double> distribution(const EncodedObservation& obs) const;

 private:
  PolicySpec spec_;
  ActorCritic<double> net_;
};

/// Column of allowed flat actions (mask pairs plus the always-allowed wait).
Eigen::Array<bool, Eigen::Dynamic, 1> flat_mask(const ActionMask& mask, const ObservationCaps& caps);

}  // namespace mci
