// Clipped-surrogate actor-critic training (PPO) over the per-minute
// assignment environment, with GAE advantages and Adam updates.
#pragma once

#include "mci/generator.hpp"
#include "mci/mlp.hpp"
#include "mci/observation.hpp"
#include "mci/policy.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mci {

struct PpoConfig {
  double clip = 0.2;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  int epochs = 4;
  int minibatch = 256;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double learning_rate = 3e-4;
  double max_grad_norm = 0.5;
  int rollout_steps = 2048;   // environment steps per iteration (all envs)
  int parallel_envs = 8;
  long total_steps = 200000;
  int hidden = 128;
  double reward_scale = 0.01;
};

/// One optimisation batch; samples are columns.
struct PpoBatch {
  Eigen::MatrixXd observations;                              // obs_size x n
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> allowed;  // actions x n
  Eigen::VectorXi actions;
  Eigen::VectorXd old_log_probs;
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;
};

struct LossTerms {
  double total = 0.0;
  double policy = 0.0;   // -mean clipped surrogate
  double value = 0.0;    // mean squared error (unweighted)
  double entropy = 0.0;  // mean entropy (unweighted)
};

/// total = policy + value_coef * value - entropy_coef * entropy. When `grad`
/// is non-null it receives dtotal/dparams in ActorCritic parameter order.
LossTerms ppo_loss(const ActorCritic<double>& net, const PpoBatch& batch, double clip, double value_coef,
                   double entropy_coef, Eigen::VectorXd* grad);

/// Surrogate term alone (no value or entropy), for gradient checks.
double clipped_surrogate_loss(const ActorCritic<double>& net, const PpoBatch& batch, double clip,
                              Eigen::VectorXd* grad);

/// Generalised advantage estimation over one trajectory segment.
/// `dones[t]` marks that step t ended its episode; `last_value` bootstraps
/// the final step when it did not.
void compute_gae(const std::vector<double>& rewards, const std::vector<double>& values, const std::vector<bool>& dones,
                 double last_value, double gamma, double lambda, std::vector<double>& advantages,
                 std::vector<double>& returns);

/// Scaled-Gaussian initialisation; the actor's output layer is shrunk so the
/// initial policy is near-uniform.
void initialize_network(ActorCritic<double>& net, std::uint64_t seed);

struct CurvePoint {
  int iteration = 0;
  long steps = 0;
  double mean_reward = 0.0;
};

struct TrainResult {
  PolicySpec spec;
  std::vector<CurvePoint> curve;
};

/// Trains on scenarios drawn from `family` with per-episode seeds derived
/// from `seed`. Deterministic given its inputs. Throws Error(Divergence) if
/// the mean reward becomes NaN.
TrainResult train_ppo(const GeneratorConfig& family, const ObservationCaps& caps, const PpoConfig& config,
                      std::uint64_t seed, const std::function<void(const CurvePoint&)>& progress = {});

/// iteration,steps,mean_reward
std::string curve_to_csv(const std::vector<CurvePoint>& curve);

}  // namespace mci
