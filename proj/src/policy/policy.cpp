#include "mci/policy.hpp"
#include "mci/error.hpp"
#include "mci/greedy.hpp"

#include <algorithm>
#include <cmath>

namespace mci {

std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::Random: return "random";
    case PolicyKind::Greedy: return "greedy";
    case PolicyKind::Learned: return "learned";
  }
  return "?";
}

std::optional<PolicyKind> policy_kind_from_string(std::string_view name) {
  for (auto k : {PolicyKind::Random, PolicyKind::Greedy, PolicyKind::Learned})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::size_t learned_parameter_count(const ObservationCaps& caps, int hidden) {
  return ActorCritic<double>(observation_size(caps), hidden, action_count(caps)).parameter_count();
}

int action_index(const Action& a, const ObservationCaps& caps) {
  if (a.is_wait()) return caps.max_patients * caps.max_hospitals;
  return a.patient_slot * caps.max_hospitals + a.hospital_slot;
}

Action action_from_index(int index, const ObservationCaps& caps) {
  if (index >= caps.max_patients * caps.max_hospitals) return {};
  return {index / caps.max_hospitals, index % caps.max_hospitals};
}

Eigen::Array<bool, Eigen::Dynamic, 1> flat_mask(const ActionMask& mask, const ObservationCaps& caps) {
  Eigen::Array<bool, Eigen::Dynamic, 1> out(action_count(caps));
  for (int p = 0; p < caps.max_patients; ++p)
    for (int h = 0; h < caps.max_hospitals; ++h) out[p * caps.max_hospitals + h] = mask(p, h);
  out[out.size() - 1] = true;
  return out;
}

Policy Policy::random() {
  Policy p;
  p.spec_.kind = PolicyKind::Random;
  return p;
}

Policy Policy::greedy() {
  Policy p;
  p.spec_.kind = PolicyKind::Greedy;
  return p;
}

Policy Policy::learned(PolicySpec spec) {
  if (spec.kind != PolicyKind::Learned) throw Error(ErrorCode::PolicyLoad, "spec is not a learned policy");
  if (spec.hidden < 1 || spec.caps.max_patients < 1 || spec.caps.max_hospitals < 1)
    throw Error(ErrorCode::PolicyLoad, "invalid network shape");
  Policy p;
  p.net_ = ActorCritic<double>(observation_size(spec.caps), spec.hidden, action_count(spec.caps));
  if (spec.parameters.size() != p.net_.parameter_count())
    throw Error(ErrorCode::PolicyLoad, "parameter blob has " + std::to_string(spec.parameters.size()) +
                                           " values, shape needs " + std::to_string(p.net_.parameter_count()));
  p.net_.set_parameters(spec.parameters);
  p.spec_ = std::move(spec);
  return p;
}

std::string Policy::name() const { return std::string(to_string(spec_.kind)); }

ObservationCaps Policy::caps_for_scenario(const Scenario& scenario) const {
  return spec_.kind == PolicyKind::Learned ? spec_.caps : caps_for(scenario);
}

std::pair<Eigen::VectorXd, double> Policy::distribution(const EncodedObservation& obs) const {
  if (spec_.kind != PolicyKind::Learned) throw Error(ErrorCode::InvalidArgument, "distribution needs a learned policy");
  const Eigen::MatrixXd logits = net_.actor().forward(obs.features);
  const Eigen::MatrixXd value = net_.critic().forward(obs.features);
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> allowed = flat_mask(obs.mask, spec_.caps);
  const Eigen::MatrixXd logp = masked_log_softmax<double>(logits, allowed);
  return {logp.col(0), value(0, 0)};
}

Decision Policy::act(const SimState& state, const EncodedObservation& obs, Rng& rng, ActMode mode) const {
  Decision d;
  switch (spec_.kind) {
    case PolicyKind::Random: {
      std::vector<Action> choices;
      for (Eigen::Index p = 0; p < obs.mask.rows(); ++p)
        for (Eigen::Index h = 0; h < obs.mask.cols(); ++h)
          if (obs.mask(p, h)) choices.push_back({static_cast<int>(p), static_cast<int>(h)});
      choices.push_back({});
      const auto pick = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(choices.size()) - 1));
      d.action = choices[pick];
      d.log_prob = -std::log(static_cast<double>(choices.size()));
      return d;
    }
    case PolicyKind::Greedy: {
      std::vector<std::size_t> waiting;
      for (std::size_t i = 0; i < state.patients.size(); ++i)
        if (state.patients[i].status == PatientStatus::Unassigned) waiting.push_back(i);
      std::sort(waiting.begin(), waiting.end(), [&](std::size_t a, std::size_t b) {
        const auto& pa = state.patients[a];
        const auto& pb = state.patients[b];
        if (pa.severity != pb.severity) return urgency(pa.severity) > urgency(pb.severity);
        if (pa.entry_time != pb.entry_time) return pa.entry_time < pb.entry_time;
        return pa.id < pb.id;
      });
      for (std::size_t i : waiting) {
        const auto s = greedy_suggest(state, state.patients[i].id);
        if (!s) continue;
        d.action = {static_cast<int>(i), static_cast<int>(*state.scenario->hospital_index(s->hospital_id))};
        d.value = s->projection.reward;
        return d;
      }
      return d;
    }
    case PolicyKind::Learned: {
      const auto [logp, value] = distribution(obs);
      d.value = value;
      int index = 0;
      if (mode == ActMode::Argmax) {
        logp.maxCoeff(&index);
      } else {
        std::vector<double> probs(static_cast<std::size_t>(logp.size()));
        for (Eigen::Index i = 0; i < logp.size(); ++i) probs[static_cast<std::size_t>(i)] = std::exp(logp[i]);
        index = static_cast<int>(rng.categorical(probs));
      }
      d.action = action_from_index(index, spec_.caps);
      d.log_prob = logp[index];
      return d;
    }
  }
  return d;
}

}  // namespace mci
