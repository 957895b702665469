#pragma once

#include <array>
#include <optional>
#include <random>
#include <vector>

#include "pmarl/marl/ppo.hpp"
#include "pmarl/marl/rollout.hpp"

namespace pmarl::marl {

struct UpdateReport {
  int update = 0;  // 1-based
  std::int64_t env_steps = 0;  // cumulative
  int episodes = 0;
  std::array<double, sim::kNumAgents> mean_return{};  // composed return over finished episodes
  std::array<std::array<int, 5>, sim::kNumAgents> status_counts{};  // indexed by AgentStatus
  std::array<std::optional<UpdateStats>, sim::kNumAgents> ppo;
  int share_breaches = 0;
  int team_bound_steps = 0;
};

// Owns the learners for each learner seat and the worker pool. A seat
// without a learner is driven by a frozen background pool.
class Trainer {
 public:
  // learn[i] selects whether seat i is trained; the other seat must then be
  // given a non-empty background pool.
  Trainer(const TrainConfig& cfg, const EnvironmentSpec& env, std::array<bool, sim::kNumAgents> learn = {true, true},
          std::array<std::vector<tensor::GaussianPolicyHead>, sim::kNumAgents> background = {});

  UpdateReport run_update();
  bool done() const { return env_steps_ >= cfg_.total_steps; }

  const TrainConfig& config() const { return cfg_; }
  const EnvironmentSpec& environment() const { return env_; }
  std::int64_t env_steps() const { return env_steps_; }
  int updates() const { return update_; }
  const std::optional<AgentLearner>& learner(int seat) const { return learners_[seat]; }
  std::optional<AgentLearner>& learner(int seat) { return learners_[seat]; }

  // Sampling stream used for minibatch shuffling, exposed for determinism tests.
  const std::mt19937_64& update_rng() const { return update_rng_; }

 private:
  std::array<Seat, sim::kNumAgents> seats() const;

  TrainConfig cfg_;
  EnvironmentSpec env_;
  std::array<std::optional<AgentLearner>, sim::kNumAgents> learners_;
  std::array<std::vector<tensor::GaussianPolicyHead>, sim::kNumAgents> background_;
  std::vector<Worker> workers_;
  std::mt19937_64 update_rng_;
  std::int64_t env_steps_ = 0;
  int update_ = 0;
};

}  // namespace pmarl::marl
