#include "pmarl/marl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pmarl/errors.hpp"

namespace pmarl::marl {

using tensor::Matrix;

double clipped_surrogate(double ratio, double advantage, double eps) {
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
  return std::min(ratio * advantage, clipped * advantage);
}

double clipped_surrogate_grad_logprob(double ratio, double advantage, double eps) {
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
  return ratio * advantage <= clipped * advantage ? ratio * advantage : 0.0;
}

std::vector<double> normalize_advantages(std::span<const double> advantages) {
  std::vector<double> out(advantages.begin(), advantages.end());
  if (out.empty()) return out;
  const double n = static_cast<double>(out.size());
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / n;
  double var = 0.0;
  for (double a : out) var += (a - mean) * (a - mean);
  const double std_dev = std::max(std::sqrt(var / n), 1e-8);
  for (double& a : out) a = (a - mean) / std_dev;
  return out;
}

PolicyLoss policy_loss(const tensor::GaussianPolicyHead& policy, const Matrix& obs, const Matrix& actions,
                       std::span<const double> old_logprob, std::span<const double> advantages, double clip_eps,
                       double entropy_coef) {
  const std::size_t b = obs.rows;
  if (actions.rows != b || old_logprob.size() != b || advantages.size() != b || b == 0) {
    throw ContractViolation("policy_loss: batch size mismatch");
  }
  PolicyLoss out;
  tensor::BatchCache cache;
  const Matrix mean = tensor::mlp_forward_batch(policy.mean_net, obs, &cache);
  const auto& log_std = policy.log_std;
  tensor::Action inv_var{};
  for (std::size_t d = 0; d < tensor::kActionDim; ++d) inv_var[d] = std::exp(-2.0 * log_std[d]);

  // d(-mean surrogate)/d logp per sample, chained into the mean and log_std.
  Matrix up_mean(b, tensor::kActionDim);
  double surrogate_sum = 0.0;
  const double inv_b = 1.0 / static_cast<double>(b);
  for (std::size_t r = 0; r < b; ++r) {
    const double logp = tensor::diag_gaussian_logprob(mean.row(r), log_std, actions.row(r));
    const double ratio = std::exp(logp - old_logprob[r]);
    surrogate_sum += clipped_surrogate(ratio, advantages[r], clip_eps);
    out.ratio_sum += ratio;
    out.approx_kl_sum += (ratio - 1.0) - (logp - old_logprob[r]);
    if (std::abs(ratio - 1.0) > clip_eps) out.clipped += 1;
    const double g = -clipped_surrogate_grad_logprob(ratio, advantages[r], clip_eps) * inv_b;
    for (std::size_t d = 0; d < tensor::kActionDim; ++d) {
      const double diff = actions(r, d) - mean(r, d);
      up_mean(r, d) = g * diff * inv_var[d];
      out.log_std_grad[d] += g * (diff * diff * inv_var[d] - 1.0);
    }
  }
  out.entropy = tensor::gaussian_entropy(policy);
  out.loss = -surrogate_sum * inv_b - entropy_coef * out.entropy;
  for (auto& g : out.log_std_grad) g -= entropy_coef;
  out.mean_grads = tensor::MlpGrads::zeros_like(policy.mean_net);
  tensor::mlp_backward_batch(policy.mean_net, cache, up_mean, out.mean_grads);
  return out;
}

double value_loss(const tensor::MlpParams& critic, const Matrix& inputs, std::span<const double> targets,
                  double value_coef, tensor::MlpGrads* grads) {
  const std::size_t b = inputs.rows;
  if (targets.size() != b || b == 0) throw ContractViolation("value_loss: batch size mismatch");
  tensor::BatchCache cache;
  const Matrix v = tensor::mlp_forward_batch(critic, inputs, &cache);
  Matrix up(b, 1);
  double loss = 0.0;
  for (std::size_t r = 0; r < b; ++r) {
    const double err = v(r, 0) - targets[r];
    loss += 0.5 * err * err;
    up(r, 0) = value_coef * err / static_cast<double>(b);
  }
  loss *= value_coef / static_cast<double>(b);
  if (grads) {
    *grads = tensor::MlpGrads::zeros_like(critic);
    tensor::mlp_backward_batch(critic, cache, up, *grads);
  }
  return loss;
}

namespace {

// Scales every gradient span so their joint L2 norm is at most max_norm.
void clip_grad_norm(std::span<const std::span<double>> grads, double max_norm) {
  if (max_norm <= 0.0) return;
  double sq = 0.0;
  for (auto g : grads) {
    for (double v : g) sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm) || norm <= max_norm) return;
  const double scale = max_norm / norm;
  for (auto g : grads) {
    for (double& v : g) v *= scale;
  }
}

std::vector<std::span<double>> mutable_spans(tensor::MlpGrads& g) {
  std::vector<std::span<double>> out;
  for (std::size_t i = 0; i < g.weights.size(); ++i) {
    out.emplace_back(g.weights[i].data);
    out.emplace_back(g.biases[i]);
  }
  return out;
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> idx) {
  Matrix out(idx.size(), m.cols);
  for (std::size_t r = 0; r < idx.size(); ++r) std::copy_n(m.row(idx[r]).begin(), m.cols, out.row(r).begin());
  return out;
}

std::vector<double> gather(std::span<const double> v, std::span<const std::size_t> idx) {
  std::vector<double> out(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) out[r] = v[idx[r]];
  return out;
}

double critic_step(tensor::MlpParams& critic, tensor::AdamState& opt, const Matrix& inputs,
                   std::span<const double> targets, std::span<const std::size_t> idx, const TrainConfig& cfg,
                   const std::string& context) {
  tensor::MlpGrads grads;
  const double loss = value_loss(critic, gather_rows(inputs, idx), gather(targets, idx), cfg.value_coef, &grads);
  if (!std::isfinite(loss)) throw NonFiniteError("ppo_update: non-finite value loss at " + context);
  auto spans = mutable_spans(grads);
  clip_grad_norm(spans, cfg.max_grad_norm);
  const auto views = critic.views("");
  const auto gviews = grads.views("");
  try {
    tensor::adam_step(opt, views, gviews);
  } catch (const NonFiniteError& e) {
    throw NonFiniteError(std::string(e.what()) + " at " + context);
  }
  return loss;
}

}  // namespace

UpdateStats ppo_update(AgentLearner& learner, const AgentBuffer& buffer, const TrainConfig& cfg,
                       std::mt19937_64& rng) {
  UpdateStats stats;
  const std::size_t n = buffer.size();
  stats.samples = n;
  if (n == 0) return stats;
  if (!buffer.has_advantages() || buffer.returns_self.size() != n || buffer.returns_coop.size() != n) {
    throw ContractViolation("ppo_update: advantages and returns must be computed first");
  }
  const bool pemn = learner.variant == Variant::PeMN;
  if (pemn != learner.critic_coop.has_value()) {
    throw ContractViolation("ppo_update: cooperation critic present iff variant is PeMN");
  }

  const std::size_t obs_dim = sim::kObsDim;
  Matrix obs(n, obs_dim), critic_in(n, learner.critic_self.input_size()), other_obs(n, obs_dim);
  Matrix actions(n, tensor::kActionDim);
  std::vector<double> old_logp(n);
  std::vector<double> scratch;
  for (std::size_t t = 0; t < n; ++t) {
    const auto& tr = buffer.transitions[t];
    std::copy(tr.obs_self.begin(), tr.obs_self.end(), obs.row(t).begin());
    std::copy(tr.obs_others.begin(), tr.obs_others.end(), other_obs.row(t).begin());
    critic_self_input(learner.variant, tr.obs_self, tr.obs_others, scratch);
    std::copy(scratch.begin(), scratch.end(), critic_in.row(t).begin());
    actions(t, 0) = tr.action[0];
    actions(t, 1) = tr.action[1];
    old_logp[t] = tr.logprob;
  }
  const std::vector<double> adv = normalize_advantages(buffer.advantages);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t mb = static_cast<std::size_t>(cfg.minibatch);
  std::size_t minibatches = 0;
  std::size_t clipped = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0, k = 0; start < n; start += mb, ++k) {
      const std::span<const std::size_t> idx(order.data() + start, std::min(n, start + mb) - start);
      const std::string context = "epoch " + std::to_string(epoch) + ", minibatch " + std::to_string(k);

      PolicyLoss pl = policy_loss(learner.policy, gather_rows(obs, idx), gather_rows(actions, idx),
                                  gather(old_logp, idx), gather(adv, idx), cfg.clip_eps, cfg.entropy_coef);
      if (!std::isfinite(pl.loss)) throw NonFiniteError("ppo_update: non-finite policy loss at " + context);
      auto spans = mutable_spans(pl.mean_grads);
      spans.emplace_back(pl.log_std_grad);
      clip_grad_norm(spans, cfg.max_grad_norm);
      auto gviews = pl.mean_grads.views("mean.");
      gviews.push_back({"log_std", pl.log_std_grad});
      const auto pviews = learner.policy.views();
      try {
        tensor::adam_step(learner.policy_opt, pviews, gviews);
      } catch (const NonFiniteError& e) {
        throw NonFiniteError(std::string(e.what()) + " at " + context);
      }
      learner.policy.clamp_log_std();

      stats.policy_loss += pl.loss;
      stats.entropy += pl.entropy;
      stats.mean_ratio += pl.ratio_sum;
      stats.approx_kl += pl.approx_kl_sum;
      clipped += pl.clipped;

      stats.value_loss_self +=
          critic_step(learner.critic_self, learner.critic_self_opt, critic_in, buffer.returns_self, idx, cfg, context);
      if (pemn) {
        stats.value_loss_coop += critic_step(*learner.critic_coop, *learner.critic_coop_opt, other_obs,
                                             buffer.returns_coop, idx, cfg, context);
      }
      minibatches += 1;
    }
  }

  const double m = static_cast<double>(minibatches);
  const double samples = static_cast<double>(n) * cfg.epochs;
  stats.policy_loss /= m;
  stats.value_loss_self /= m;
  stats.value_loss_coop /= m;
  stats.entropy /= m;
  stats.mean_ratio /= samples;
  stats.approx_kl /= samples;
  stats.clip_fraction = static_cast<double>(clipped) / samples;
  return stats;
}

}  // namespace pmarl::marl
