#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "pmarl/marl/buffer.hpp"
#include "pmarl/marl/config.hpp"
#include "pmarl/marl/learner.hpp"
#include "pmarl/reward/reward.hpp"
#include "pmarl/sim/env.hpp"
#include "pmarl/sim/scenario.hpp"

namespace pmarl::marl {

// Who controls one vehicle during collection. A learner seat samples from its
// policy and records transitions; otherwise one of the frozen `pool` policies
// is drawn per episode and acts with its mean action.
struct Seat {
  const AgentLearner* learner = nullptr;
  std::vector<const tensor::GaussianPolicyHead*> pool;
  reward::PersonalityParams personality = reward::PersonalityParams::selfish();
};

struct EnvironmentSpec {
  int level = 1;
  sim::ScenarioParams scenario;
  reward::RewardConfig reward;
};

// One environment instance plus its random stream. Episodes persist across
// rollouts; a new scenario is generated whenever both agents are terminal.
struct Worker {
  std::mt19937_64 rng;
  sim::Scene scene;
  sim::EnvState state;
  std::array<sim::Observation, sim::kNumAgents> obs{};
  std::array<double, sim::kNumAgents> progress{};
  std::array<std::size_t, sim::kNumAgents> pool_choice{};
  EpisodeSummary episode;
  bool needs_reset = true;

  static Worker create(std::uint64_t base_seed, int worker_index);
};

std::vector<Worker> make_workers(const TrainConfig& cfg);

// Starts a fresh episode on `w` (new scenario drawn from the worker stream).
void reset_worker(Worker& w, const EnvironmentSpec& env, const std::array<Seat, sim::kNumAgents>& seats);

// Each worker advances cfg.rollout_steps / workers environment steps; worker
// buffers are concatenated in worker order. Runs workers on threads when
// there is more than one.
RolloutBuffer collect_rollouts(std::vector<Worker>& workers, const std::array<Seat, sim::kNumAgents>& seats,
                               const TrainConfig& cfg, const EnvironmentSpec& env);

}  // namespace pmarl::marl
