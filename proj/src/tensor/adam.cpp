#include "pmarl/tensor/adam.hpp"

#include <cmath>

#include "pmarl/errors.hpp"

namespace pmarl::tensor {

AdamState AdamState::for_params(std::span<const ParamView> params, double lr, double beta1,
                                double beta2, double eps) {
  AdamState s;
  s.lr = lr;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.eps = eps;
  for (const auto& p : params) {
    s.m.emplace_back(p.values.size(), 0.0);
    s.v.emplace_back(p.values.size(), 0.0);
  }
  return s;
}

void adam_step(AdamState& state, std::span<const ParamView> params, std::span<const GradView> grads) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw ContractViolation("adam_step: parameter, gradient and moment sets differ in length");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::size_t n = params[i].values.size();
    if (grads[i].values.size() != n || state.m[i].size() != n || state.v[i].size() != n) {
      throw ContractViolation("adam_step: shape mismatch at " + params[i].name);
    }
    if (!all_finite(grads[i].values)) {
      throw NonFiniteError("adam_step: non-finite gradient in " + grads[i].name);
    }
  }

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(state.beta1, t);
  const double bias2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].values;
    auto g = grads[i].values;
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g[k];
      v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g[k] * g[k];
      const double m_hat = m[k] / bias1;
      const double v_hat = v[k] / bias2;
      p[k] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

}  // namespace pmarl::tensor
