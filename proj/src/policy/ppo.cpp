#include "mci/ppo.hpp"
#include "mci/env.hpp"
#include "mci/error.hpp"
#include "mci/rng.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

namespace mci {

LossTerms ppo_loss(const ActorCritic<double>& net, const PpoBatch& batch, double clip, double value_coef,
                   double entropy_coef, Eigen::VectorXd* grad) {
  const auto n = batch.actions.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "ppo_loss: empty batch");
  const double inv_n = 1.0 / static_cast<double>(n);

  Mlp<double>::Cache actor_cache;
  Mlp<double>::Cache critic_cache;
  const Eigen::MatrixXd logits = net.actor().forward(batch.observations, grad ? &actor_cache : nullptr);
  const Eigen::MatrixXd values = net.critic().forward(batch.observations, grad ? &critic_cache : nullptr);
  const Eigen::MatrixXd logp = masked_log_softmax<double>(logits, batch.allowed);

  Eigen::MatrixXd d_logits = Eigen::MatrixXd::Zero(logits.rows(), n);
  Eigen::MatrixXd d_values(1, n);
  LossTerms terms;

  for (Eigen::Index c = 0; c < n; ++c) {
    double entropy = 0.0;
    for (Eigen::Index k = 0; k < logp.rows(); ++k)
      if (batch.allowed(k, c)) entropy -= std::exp(logp(k, c)) * logp(k, c);

    const int a = batch.actions[c];
    const double adv = batch.advantages[c];
    const double ratio = std::exp(logp(a, c) - batch.old_log_probs[c]);
    const double unclipped = ratio * adv;
    const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip) * adv;
    terms.policy -= std::min(unclipped, clipped) * inv_n;
    terms.entropy += entropy * inv_n;

    const double diff = values(0, c) - batch.returns[c];
    terms.value += diff * diff * inv_n;
    d_values(0, c) = value_coef * 2.0 * diff * inv_n;

    // d(-surrogate)/dlogp(a): active only on the unclipped branch.
    const double g_logp = unclipped <= clipped ? -ratio * adv * inv_n : 0.0;
    for (Eigen::Index k = 0; k < logp.rows(); ++k) {
      if (!batch.allowed(k, c)) continue;
      const double p = std::exp(logp(k, c));
      d_logits(k, c) += g_logp * ((k == a ? 1.0 : 0.0) - p);
      d_logits(k, c) += entropy_coef * inv_n * p * (logp(k, c) + entropy);
    }
  }
  terms.total = terms.policy + value_coef * terms.value - entropy_coef * terms.entropy;

  if (grad) {
    grad->setZero(static_cast<Eigen::Index>(net.parameter_count()));
    const std::size_t actor_n = net.actor().parameter_count();
    std::span<double> all(grad->data(), static_cast<std::size_t>(grad->size()));
    net.actor().backward(actor_cache, d_logits, all.first(actor_n));
    net.critic().backward(critic_cache, d_values, all.subspan(actor_n));
  }
  return terms;
}

double clipped_surrogate_loss(const ActorCritic<double>& net, const PpoBatch& batch, double clip, Eigen::VectorXd* grad) {
  return ppo_loss(net, batch, clip, 0.0, 0.0, grad).total;
}

void compute_gae(const std::vector<double>& rewards, const std::vector<double>& values, const std::vector<bool>& dones,
                 double last_value, double gamma, double lambda, std::vector<double>& advantages,
                 std::vector<double>& returns) {
  const std::size_t n = rewards.size();
  advantages.assign(n, 0.0);
  returns.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const double next_value = t + 1 < n ? values[t + 1] : last_value;
    const double live = dones[t] ? 0.0 : 1.0;
    const double delta = rewards[t] + gamma * next_value * live - values[t];
    running = delta + gamma * lambda * live * running;
    advantages[t] = running;
    returns[t] = running + values[t];
  }
}

void initialize_network(ActorCritic<double>& net, std::uint64_t seed) {
  Rng rng(seed);
  auto init = [&rng](Mlp<double>& mlp, double last_gain) {
    for (std::size_t l = 0; l < mlp.layers(); ++l) {
      auto& w = mlp.weight(l);
      const double gain = l + 1 == mlp.layers() ? last_gain : 1.0;
      const double scale = gain / std::sqrt(static_cast<double>(w.cols()));
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.normal() * scale;
      mlp.bias(l).setZero();
    }
  };
  init(net.actor(), 0.01);
  init(net.critic(), 1.0);
}

namespace {

struct Adam {
  Eigen::VectorXd m, v;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long t = 0;

  explicit Adam(Eigen::Index n) : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}

  void update(Eigen::VectorXd& params, const Eigen::VectorXd& g, double lr) {
    ++t;
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }
};

struct Trajectory {
  std::vector<Eigen::VectorXd> observations;
  std::vector<Eigen::Array<bool, Eigen::Dynamic, 1>> allowed;
  std::vector<int> actions;
  std::vector<double> log_probs, values, rewards;
  std::vector<bool> dones;
};

}  // namespace

TrainResult train_ppo(const GeneratorConfig& family, const ObservationCaps& caps, const PpoConfig& cfg,
                      std::uint64_t seed, const std::function<void(const CurvePoint&)>& progress) {
  validate_config(family);
  if (family.patient_count > caps.max_patients || family.hospital_count > caps.max_hospitals)
    throw Error(ErrorCode::Capacity, "training family does not fit the observation caps");
  if (cfg.parallel_envs < 1 || cfg.rollout_steps < cfg.parallel_envs || cfg.minibatch < 1 || cfg.epochs < 0)
    throw Error(ErrorCode::Config, "invalid PPO configuration");

  const int obs_size = observation_size(caps);
  const int n_actions = action_count(caps);
  ActorCritic<double> net(obs_size, cfg.hidden, n_actions);
  initialize_network(net, splitmix64(seed ^ 0x1F2E3D4C5B6A7988ULL));
  Eigen::VectorXd params = Eigen::Map<const Eigen::VectorXd>(net.parameters().data(),
                                                             static_cast<Eigen::Index>(net.parameter_count()));
  Adam adam(params.size());
  Rng rng(splitmix64(seed));

  std::uint64_t episode_counter = 0;
  auto next_scenario = [&]() {
    GeneratorConfig c = family;
    c.seed = splitmix64(seed * 0x9E3779B97F4A7C15ULL + ++episode_counter);
    return std::make_shared<const Scenario>(generate_scenario(c));
  };

  const int n_envs = cfg.parallel_envs;
  std::vector<MciEnv> envs(static_cast<std::size_t>(n_envs), MciEnv(caps));
  for (auto& env : envs) env.reset(next_scenario());

  TrainResult result;
  long steps = 0;
  double last_mean = 0.0;
  const int steps_per_env = cfg.rollout_steps / n_envs;

  for (int iteration = 1; steps < cfg.total_steps; ++iteration) {
    // Last rollout is cut short at total_steps.
    const int iter_steps = static_cast<int>(std::min<long>(steps_per_env, (cfg.total_steps - steps) / n_envs));
    if (iter_steps < 1) break;
    std::vector<Trajectory> traj(static_cast<std::size_t>(n_envs));
    std::vector<double> finished;

    for (int t = 0; t < iter_steps; ++t) {
      Eigen::MatrixXd x(obs_size, n_envs);
      Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> allowed(n_actions, n_envs);
      for (int e = 0; e < n_envs; ++e) {
        x.col(e) = envs[static_cast<std::size_t>(e)].observation().features;
        allowed.col(e) = flat_mask(envs[static_cast<std::size_t>(e)].observation().mask, caps);
      }
      const Eigen::MatrixXd logp = masked_log_softmax<double>(net.actor().forward(x), allowed);
      const Eigen::MatrixXd values = net.critic().forward(x);

      for (int e = 0; e < n_envs; ++e) {
        auto& env = envs[static_cast<std::size_t>(e)];
        auto& tr = traj[static_cast<std::size_t>(e)];
        std::vector<double> probs(static_cast<std::size_t>(n_actions));
        for (int k = 0; k < n_actions; ++k) probs[static_cast<std::size_t>(k)] = std::exp(logp(k, e));
        const int a = static_cast<int>(rng.categorical(probs));
        tr.observations.push_back(x.col(e));
        tr.allowed.push_back(allowed.col(e));
        tr.actions.push_back(a);
        tr.log_probs.push_back(logp(a, e));
        tr.values.push_back(values(0, e));
        const auto r = env.step(action_from_index(a, caps));
        tr.rewards.push_back(r.reward * cfg.reward_scale);
        tr.dones.push_back(r.done);
        if (r.done) {
          finished.push_back(env.episode_reward());
          env.reset(next_scenario());
        }
      }
    }
    steps += static_cast<long>(iter_steps) * n_envs;

    // Advantages per environment, then one flat batch.
    const int n = iter_steps * n_envs;
    PpoBatch batch;
    batch.observations.resize(obs_size, n);
    batch.allowed.resize(n_actions, n);
    batch.actions.resize(n);
    batch.old_log_probs.resize(n);
    batch.advantages.resize(n);
    batch.returns.resize(n);
    Eigen::MatrixXd tail(obs_size, n_envs);
    for (int e = 0; e < n_envs; ++e) tail.col(e) = envs[static_cast<std::size_t>(e)].observation().features;
    const Eigen::MatrixXd tail_values = net.critic().forward(tail);
    int col = 0;
    for (int e = 0; e < n_envs; ++e) {
      const auto& tr = traj[static_cast<std::size_t>(e)];
      std::vector<double> adv, ret;
      compute_gae(tr.rewards, tr.values, tr.dones, tail_values(0, e), cfg.gamma, cfg.gae_lambda, adv, ret);
      for (std::size_t t = 0; t < tr.actions.size(); ++t, ++col) {
        batch.observations.col(col) = tr.observations[t];
        batch.allowed.col(col) = tr.allowed[t];
        batch.actions[col] = tr.actions[t];
        batch.old_log_probs[col] = tr.log_probs[t];
        batch.advantages[col] = adv[t];
        batch.returns[col] = ret[t];
      }
    }
    const double adv_mean = batch.advantages.mean();
    const double adv_std = std::sqrt((batch.advantages.array() - adv_mean).square().mean());
    batch.advantages = ((batch.advantages.array() - adv_mean) / (adv_std + 1e-8)).matrix();

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      for (int i = n - 1; i > 0; --i) std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(rng.uniform_int(0, i))]);
      for (int start = 0; start < n; start += cfg.minibatch) {
        const int m = std::min(cfg.minibatch, n - start);
        PpoBatch mb;
        mb.observations.resize(obs_size, m);
        mb.allowed.resize(n_actions, m);
        mb.actions.resize(m);
        mb.old_log_probs.resize(m);
        mb.advantages.resize(m);
        mb.returns.resize(m);
        for (int j = 0; j < m; ++j) {
          const int src = order[static_cast<std::size_t>(start + j)];
          mb.observations.col(j) = batch.observations.col(src);
          mb.allowed.col(j) = batch.allowed.col(src);
          mb.actions[j] = batch.actions[src];
          mb.old_log_probs[j] = batch.old_log_probs[src];
          mb.advantages[j] = batch.advantages[src];
          mb.returns[j] = batch.returns[src];
        }
        Eigen::VectorXd grad;
        ppo_loss(net, mb, cfg.clip, cfg.value_coef, cfg.entropy_coef, &grad);
        const double norm = grad.norm();
        if (cfg.max_grad_norm > 0.0 && norm > cfg.max_grad_norm) grad *= cfg.max_grad_norm / norm;
        adam.update(params, grad, cfg.learning_rate);
        net.set_parameters(std::span<const double>(params.data(), static_cast<std::size_t>(params.size())));
      }
    }

    if (!finished.empty())
      last_mean = std::accumulate(finished.begin(), finished.end(), 0.0) / static_cast<double>(finished.size());
    if (std::isnan(last_mean) || !params.allFinite())
      throw Error(ErrorCode::Divergence, "training diverged at iteration " + std::to_string(iteration));
    const CurvePoint point{iteration, steps, last_mean};
    result.curve.push_back(point);
    if (progress) progress(point);
  }

  result.spec.kind = PolicyKind::Learned;
  result.spec.caps = caps;
  result.spec.hidden = cfg.hidden;
  result.spec.reward_scale = cfg.reward_scale;
  result.spec.training_seed = seed;
  result.spec.parameters.resize(static_cast<std::size_t>(params.size()));
  // Stored at float precision so the in-memory policy equals its saved form.
  for (Eigen::Index i = 0; i < params.size(); ++i)
    result.spec.parameters[static_cast<std::size_t>(i)] = static_cast<double>(static_cast<float>(params[i]));
  return result;
}

std::string curve_to_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream out;
  out << "iteration,steps,mean_reward\n";
  out.precision(10);
  for (const auto& p : curve) out << p.iteration << ',' << p.steps << ',' << p.mean_reward << '\n';
  return out.str();
}

}  // namespace mci
