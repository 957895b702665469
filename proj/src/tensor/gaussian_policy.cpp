#include "pmarl/tensor/gaussian_policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pmarl/errors.hpp"

namespace pmarl::tensor {

namespace {
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
}

GaussianPolicyHead GaussianPolicyHead::init(std::size_t obs_dim, std::span<const std::size_t> hidden,
                                            double initial_log_std, std::mt19937_64& rng) {
  std::vector<std::size_t> sizes{obs_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(kActionDim);
  GaussianPolicyHead head;
  head.mean_net = MlpParams::init_uniform(std::move(sizes), rng);
  head.log_std.fill(initial_log_std);
  head.clamp_log_std();
  return head;
}

void GaussianPolicyHead::clamp_log_std() {
  for (auto& s : log_std) s = std::clamp(s, kLogStdMin, kLogStdMax);
}

std::vector<ParamView> GaussianPolicyHead::views() {
  auto out = mean_net.views("mean.");
  out.push_back({"log_std", log_std});
  return out;
}

double diag_gaussian_logprob(std::span<const double> mean, std::span<const double> log_std,
                             std::span<const double> action) {
  if (mean.size() != action.size() || log_std.size() != action.size()) {
    throw ContractViolation("gaussian_logprob: dimension mismatch");
  }
  double lp = 0.0;
  for (std::size_t k = 0; k < action.size(); ++k) {
    const double z = (action[k] - mean[k]) * std::exp(-log_std[k]);
    lp += -0.5 * z * z - log_std[k] - kHalfLog2Pi;
  }
  return lp;
}

double gaussian_logprob(const GaussianPolicyHead& head, std::span<const double> obs,
                        const Action& action) {
  const Vector mean = mlp_forward(head.mean_net, obs);
  return diag_gaussian_logprob(mean, head.log_std, action);
}

double gaussian_entropy(const GaussianPolicyHead& head) {
  double h = 0.0;
  for (double s : head.log_std) h += s + 0.5 + kHalfLog2Pi;
  return h;
}

SampledAction sample_action(const GaussianPolicyHead& head, std::span<const double> obs,
                            std::mt19937_64& rng) {
  const Vector mean = mlp_forward(head.mean_net, obs);
  std::normal_distribution<double> normal(0.0, 1.0);
  SampledAction out;
  for (std::size_t k = 0; k < kActionDim; ++k) {
    out.action[k] = mean[k] + std::exp(head.log_std[k]) * normal(rng);
  }
  out.logprob = diag_gaussian_logprob(mean, head.log_std, out.action);
  return out;
}

Action mean_action(const GaussianPolicyHead& head, std::span<const double> obs) {
  const Vector mean = mlp_forward(head.mean_net, obs);
  return {mean[0], mean[1]};
}

}  // namespace pmarl::tensor
