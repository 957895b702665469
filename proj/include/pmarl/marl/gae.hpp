#pragma once

#include <span>
#include <vector>

#include "pmarl/marl/buffer.hpp"
#include "pmarl/marl/config.hpp"

namespace pmarl::marl {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// delta_t = r_t + gamma (1 - done_t) V_{t+1} - V_t, with V_T = bootstrap;
// A_t = delta_t + gamma lambda (1 - done_t) A_{t+1}; returns_t = A_t + V_t.
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values, double bootstrap,
                      std::span<const bool> dones, double gamma, double lambda);

// PeMN only: A = GAE(self stream, V_self) + GAE(coop stream, V_coop) per
// segment. Fills advantages and both return targets on the buffer.
void decomposed_advantage(AgentBuffer& buffer, Variant variant, double gamma, double lambda);

// IPPO/MAPPO: GAE over the composed reward with the single critic's values.
// PeMN: delegates to decomposed_advantage.
void compute_advantages(AgentBuffer& buffer, Variant variant, double gamma, double lambda);

}  // namespace pmarl::marl
