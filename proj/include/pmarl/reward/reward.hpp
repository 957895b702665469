#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pmarl/sim/env.hpp"

namespace pmarl::reward {

struct RewardConfig {
  double k1 = 1.0;   // progress weight
  double k2 = 0.1;   // speed weight
  double goal_reward = 20.0;
  double collision_penalty = -30.0;
  double offroad_penalty = -30.0;
  double timeout_reward = 0.0;
  double gate_distance = 40.0;  // metres; cooperative sharing applies at or below this

  bool operator==(const RewardConfig&) const = default;
};

// Self weight alpha and cooperative weight beta, with alpha + beta = 1.
class PersonalityParams {
 public:
  // Throws ConfigError unless alpha, beta >= 0 and alpha + beta = 1 (1e-12).
  PersonalityParams(double alpha, double beta);
  static PersonalityParams from_alpha(double alpha) { return {alpha, 1.0 - alpha}; }
  static PersonalityParams selfish() { return {1.0, 0.0}; }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  bool operator==(const PersonalityParams&) const = default;

 private:
  double alpha_;
  double beta_;
};

struct RewardBreakdown {
  double r_dense = 0.0;
  double r_sparse = 0.0;
  double r_self = 0.0;   // r_dense + r_sparse
  double r_coop = 0.0;   // beta * others' dense sum when gated, else 0
  double r_self_stream = 0.0;  // alpha * r_dense + r_sparse when gated, else r_self
  double r_total = 0.0;        // r_self_stream + r_coop
  bool gated = false;
};

// k1 * (prev_progress - new_progress) + k2 * speed / v_max. Progress is the
// remaining distance to the goal, so moving toward the goal is rewarded.
double dense_reward(const RewardConfig& cfg, double prev_progress, double new_progress, double speed,
                    double v_max);

double sparse_reward(const RewardConfig& cfg, sim::AgentStatus status);

// Gated (d <= gate_distance):  alpha * r_dense + r_sparse + beta * other_dense_sum
// Ungated:                     r_dense + r_sparse
// Terminal rewards are never scaled by alpha nor shared through beta.
RewardBreakdown compose_reward(const RewardConfig& cfg, const PersonalityParams& personality,
                               double r_dense, double r_sparse, double other_dense_sum,
                               double inter_vehicle_distance);

struct AgentStepInput {
  bool active = false;  // running before this step
  double prev_progress = 0.0;
  double new_progress = 0.0;
  double speed = 0.0;
  sim::AgentStatus status = sim::AgentStatus::Running;  // after this step
};

// Per-agent breakdowns for one environment step. Inactive agents get an
// all-zero breakdown and contribute nothing to the other's cooperative share.
std::array<RewardBreakdown, sim::kNumAgents> step_rewards(
    const RewardConfig& cfg, const std::array<PersonalityParams, sim::kNumAgents>& personalities,
    double v_max, const std::array<AgentStepInput, sim::kNumAgents>& inputs,
    double inter_vehicle_distance);

// Audit of one step's cooperative shares.
//  * share_ok: each r_coop lies between 0 and the sum of the other agents'
//    dense rewards, i.e. it is a convex-weighted portion of them. A failure
//    means the reward plumbing is broken.
//  * within_team_bound: r_coop <= team dense sum. This can legitimately fail
//    when an agent's own dense reward is negative (it reversed).
struct TeamBoundReport {
  std::vector<double> coop_parts;
  double team_dense_sum = 0.0;
  std::vector<bool> within_team_bound;
  bool share_ok = true;
  std::vector<std::string> breaches;

  bool all_within_team_bound() const;
};

TeamBoundReport team_reward_bound_check(std::span<const RewardBreakdown> step,
                                        std::span<const double> betas);

void to_json(nlohmann::json& j, const RewardConfig& c);
void from_json(const nlohmann::json& j, RewardConfig& c);
void to_json(nlohmann::json& j, const RewardBreakdown& b);

}  // namespace pmarl::reward
