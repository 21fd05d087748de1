// Finite-difference check of the clipped-surrogate gradient on a tiny network.
#pragma once

#include "mci/ppo.hpp"
#include "mci/rng.hpp"

#include <algorithm>
#include <cmath>

namespace mci::test {

struct GradCheck {
  double relative_error = 0.0;
  double analytic_norm = 0.0;
};

/// One random point: 2 hidden units, random parameters and a random batch
/// whose old log-probs are perturbed so that some ratios fall outside the clip range.
inline GradCheck surrogate_grad_check(Rng& rng, double clip = 0.2) {
  const int inputs = 5, actions = 4, n = 8;
  ActorCritic<double> net(inputs, 2, actions);
  Eigen::VectorXd theta(static_cast<Eigen::Index>(net.parameter_count()));
  for (auto& x : theta) x = rng.normal();
  net.set_parameters({theta.data(), static_cast<std::size_t>(theta.size())});

  PpoBatch b;
  b.observations.resize(inputs, n);
  for (auto& x : b.observations.reshaped()) x = rng.normal();
  b.allowed.resize(actions, n);
  b.actions.resize(n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < actions; ++r) b.allowed(r, c) = rng.bernoulli(0.6);
    b.allowed(actions - 1, c) = true;
    int a;
    do a = static_cast<int>(rng.uniform_int(0, actions - 1));
    while (!b.allowed(a, c));
    b.actions[c] = a;
  }
  const Eigen::MatrixXd lp = masked_log_softmax<double>(net.actor().forward(b.observations), b.allowed);
  b.old_log_probs.resize(n);
  b.advantages.resize(n);
  b.returns = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < n; ++c) {
    b.old_log_probs[c] = lp(b.actions[c], c) + 0.4 * rng.normal();
    b.advantages[c] = rng.normal();
  }

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta.size());
  clipped_surrogate_loss(net, b, clip, &grad);

  Eigen::VectorXd fd(theta.size());
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd plus = theta, minus = theta;
    plus[i] += h;
    minus[i] -= h;
    net.set_parameters({plus.data(), static_cast<std::size_t>(plus.size())});
    const double fp = clipped_surrogate_loss(net, b, clip, nullptr);
    net.set_parameters({minus.data(), static_cast<std::size_t>(minus.size())});
    const double fm = clipped_surrogate_loss(net, b, clip, nullptr);
    fd[i] = (fp - fm) / (2 * h);
  }
  const double scale = std::max({grad.norm(), fd.norm(), 1e-8});
  return {(grad - fd).norm() / scale, grad.norm()};
}

}  // namespace mci::test
