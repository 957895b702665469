#include "pmarl/reward/reward.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "pmarl/errors.hpp"

namespace pmarl::reward {

PersonalityParams::PersonalityParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || alpha < 0.0 || beta < 0.0) {
    throw ConfigError("personality: alpha and beta must be finite and non-negative");
  }
  if (std::abs(alpha + beta - 1.0) > 1e-12) {
    throw ConfigError("personality: alpha + beta must equal 1");
  }
}

double dense_reward(const RewardConfig& cfg, double prev_progress, double new_progress, double speed,
                    double v_max) {
  if (!(v_max > 0.0)) throw ContractViolation("dense_reward: v_max must be positive");
  return cfg.k1 * (prev_progress - new_progress) + cfg.k2 * speed / v_max;
}

double sparse_reward(const RewardConfig& cfg, sim::AgentStatus status) {
  switch (status) {
    case sim::AgentStatus::ReachGoal: return cfg.goal_reward;
    case sim::AgentStatus::Collision: return cfg.collision_penalty;
    case sim::AgentStatus::OffRoad: return cfg.offroad_penalty;
    case sim::AgentStatus::Timeout: return cfg.timeout_reward;
    case sim::AgentStatus::Running: return 0.0;
  }
  return 0.0;
}

RewardBreakdown compose_reward(const RewardConfig& cfg, const PersonalityParams& personality,
                               double r_dense, double r_sparse, double other_dense_sum,
                               double inter_vehicle_distance) {
  RewardBreakdown b;
  b.r_dense = r_dense;
  b.r_sparse = r_sparse;
  b.r_self = r_dense + r_sparse;
  b.gated = inter_vehicle_distance <= cfg.gate_distance;
  if (b.gated) {
    b.r_coop = personality.beta() * other_dense_sum;
    b.r_self_stream = personality.alpha() * r_dense + r_sparse;
  } else {
    b.r_coop = 0.0;
    b.r_self_stream = b.r_self;
  }
  b.r_total = b.r_self_stream + b.r_coop;
  return b;
}

std::array<RewardBreakdown, sim::kNumAgents> step_rewards(
    const RewardConfig& cfg, const std::array<PersonalityParams, sim::kNumAgents>& personalities,
    double v_max, const std::array<AgentStepInput, sim::kNumAgents>& inputs,
    double inter_vehicle_distance) {
  std::array<double, sim::kNumAgents> dense{};
  std::array<double, sim::kNumAgents> sparse{};
  for (int i = 0; i < sim::kNumAgents; ++i) {
    if (!inputs[i].active) continue;
    dense[i] = dense_reward(cfg, inputs[i].prev_progress, inputs[i].new_progress, inputs[i].speed, v_max);
    sparse[i] = sparse_reward(cfg, inputs[i].status);
  }
  std::array<RewardBreakdown, sim::kNumAgents> out{};
  for (int i = 0; i < sim::kNumAgents; ++i) {
    if (!inputs[i].active) continue;
    double others = 0.0;
    for (int j = 0; j < sim::kNumAgents; ++j) {
      if (j != i) others += dense[j];
    }
    out[i] = compose_reward(cfg, personalities[i], dense[i], sparse[i], others, inter_vehicle_distance);
  }
  return out;
}

bool TeamBoundReport::all_within_team_bound() const {
  return std::all_of(within_team_bound.begin(), within_team_bound.end(), [](bool b) { return b; });
}

TeamBoundReport team_reward_bound_check(std::span<const RewardBreakdown> step,
                                        std::span<const double> betas) {
  if (betas.size() != step.size()) throw ContractViolation("team_reward_bound_check: one beta per agent");
  constexpr double kTol = 1e-12;
  TeamBoundReport report;
  for (const auto& b : step) report.team_dense_sum += b.r_dense;
  for (std::size_t i = 0; i < step.size(); ++i) {
    const double coop = step[i].r_coop;
    double others = 0.0;
    for (std::size_t j = 0; j < step.size(); ++j) {
      if (j != i) others += step[j].r_dense;
    }
    report.coop_parts.push_back(coop);
    report.within_team_bound.push_back(coop <= report.team_dense_sum + kTol);

    const double lo = std::min(0.0, others);
    const double hi = std::max(0.0, others);
    const double expected = step[i].gated ? betas[i] * others : 0.0;
    if (coop < lo - kTol || coop > hi + kTol || std::abs(coop - expected) > kTol * (1.0 + std::abs(others))) {
      report.share_ok = false;
      report.breaches.push_back("agent " + std::to_string(i) + ": cooperative share " + std::to_string(coop) +
                                " is not beta times the others' dense sum " + std::to_string(others));
    }
  }
  return report;
}

void to_json(nlohmann::json& j, const RewardConfig& c) {
  j = {{"k1", c.k1},
       {"k2", c.k2},
       {"goal_reward", c.goal_reward},
       {"collision_penalty", c.collision_penalty},
       {"offroad_penalty", c.offroad_penalty},
       {"timeout_reward", c.timeout_reward},
       {"gate_distance", c.gate_distance}};
}

void from_json(const nlohmann::json& j, RewardConfig& c) {
  RewardConfig d;
  c.k1 = j.value("k1", d.k1);
  c.k2 = j.value("k2", d.k2);
  c.goal_reward = j.value("goal_reward", d.goal_reward);
  c.collision_penalty = j.value("collision_penalty", d.collision_penalty);
  c.offroad_penalty = j.value("offroad_penalty", d.offroad_penalty);
  c.timeout_reward = j.value("timeout_reward", d.timeout_reward);
  c.gate_distance = j.value("gate_distance", d.gate_distance);
}

void to_json(nlohmann::json& j, const RewardBreakdown& b) {
  j = {{"r_dense", b.r_dense}, {"r_sparse", b.r_sparse}, {"r_self", b.r_self},
       {"r_coop", b.r_coop},   {"r_self_stream", b.r_self_stream},
       {"r_total", b.r_total}, {"gated", b.gated}};
}

}  // namespace pmarl::reward
