#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pmarl/tensor/mlp.hpp"

namespace pmarl::tensor {

// First/second moment buffers for one ordered parameter set.
//
// The update for every scalar p with gradient g at step t (1-based) is
//   m = beta1*m + (1-beta1)*g
//   v = beta2*v + (1-beta2)*g^2
//   p -= lr * (m / (1-beta1^t)) / (sqrt(v / (1-beta2^t)) + eps)
// applied view by view in the order the views are given. Gradients are
// descended; callers pass the gradient of the quantity being minimized.
struct AdamState {
  std::uint64_t step = 0;
  std::vector<Vector> m;
  std::vector<Vector> v;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  // Moment buffers shaped like `params`, zero-filled.
  static AdamState for_params(std::span<const ParamView> params, double lr, double beta1 = 0.9,
                              double beta2 = 0.999, double eps = 1e-8);

  bool operator==(const AdamState&) const = default;
};

// Throws NonFiniteError naming the first non-finite gradient view before any
// parameter is touched; ContractViolation if shapes disagree.
void adam_step(AdamState& state, std::span<const ParamView> params, std::span<const GradView> grads);

}  // namespace pmarl::tensor
