#pragma once

#include <array>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pmarl/tensor/mlp.hpp"

namespace pmarl::tensor {

inline constexpr std::size_t kActionDim = 2;
inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

using Action = std::array<double, kActionDim>;

// Diagonal Gaussian over the 2-d action with a state-independent log std.
struct GaussianPolicyHead {
  MlpParams mean_net;
  Action log_std{-0.5, -0.5};

  static GaussianPolicyHead init(std::size_t obs_dim, std::span<const std::size_t> hidden,
                                 double initial_log_std, std::mt19937_64& rng);

  void clamp_log_std();
  std::vector<ParamView> views();

  bool operator==(const GaussianPolicyHead&) const = default;
};

double diag_gaussian_logprob(std::span<const double> mean, std::span<const double> log_std,
                             std::span<const double> action);

double gaussian_logprob(const GaussianPolicyHead& head, std::span<const double> obs,
                        const Action& action);

// Differential entropy of the action distribution (independent of obs).
double gaussian_entropy(const GaussianPolicyHead& head);

struct SampledAction {
  Action action;  // raw draw, not clamped
  double logprob = 0.0;
};

SampledAction sample_action(const GaussianPolicyHead& head, std::span<const double> obs,
                            std::mt19937_64& rng);

Action mean_action(const GaussianPolicyHead& head, std::span<const double> obs);

}  // namespace pmarl::tensor
