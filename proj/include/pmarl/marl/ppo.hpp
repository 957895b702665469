#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "pmarl/marl/buffer.hpp"
#include "pmarl/marl/config.hpp"
#include "pmarl/marl/learner.hpp"
#include "pmarl/tensor/matrix.hpp"

namespace pmarl::marl {

// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A)
double clipped_surrogate(double ratio, double advantage, double eps);

// d clipped_surrogate / d log pi. Equals ratio * A while the unclipped term is
// the active branch of the min, 0 once clipping binds.
double clipped_surrogate_grad_logprob(double ratio, double advantage, double eps);

// Mean 0, std 1 over the batch, std floored at 1e-8.
std::vector<double> normalize_advantages(std::span<const double> advantages);

// Minibatch policy objective: -mean(clipped surrogate) - entropy_coef * entropy,
// with its gradient with respect to the mean network and log_std.
struct PolicyLoss {
  double loss = 0.0;
  double entropy = 0.0;
  double ratio_sum = 0.0;
  double approx_kl_sum = 0.0;
  std::size_t clipped = 0;
  tensor::MlpGrads mean_grads;
  tensor::Action log_std_grad{};
};

PolicyLoss policy_loss(const tensor::GaussianPolicyHead& policy, const tensor::Matrix& obs,
                       const tensor::Matrix& actions, std::span<const double> old_logprob,
                       std::span<const double> advantages, double clip_eps, double entropy_coef);

// value_coef * 0.5 * mean((V - target)^2) and its parameter gradient.
double value_loss(const tensor::MlpParams& critic, const tensor::Matrix& inputs, std::span<const double> targets,
                  double value_coef, tensor::MlpGrads* grads);

struct UpdateStats {
  std::size_t samples = 0;
  double policy_loss = 0.0;  // -mean surrogate, averaged over minibatches
  double value_loss_self = 0.0;
  double value_loss_coop = 0.0;
  double entropy = 0.0;
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

// K epochs of seeded minibatch shuffles over the agent's buffer. Requires
// advantages and return targets to be populated. Throws NonFiniteError naming
// the epoch and minibatch if a loss or gradient goes non-finite.
UpdateStats ppo_update(AgentLearner& learner, const AgentBuffer& buffer, const TrainConfig& cfg,
                       std::mt19937_64& rng);

}  // namespace pmarl::marl
