#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pmarl/harness/metrics.hpp"
#include "pmarl/marl/rollout.hpp"
#include "pmarl/reward/reward.hpp"
#include "pmarl/tensor/gaussian_policy.hpp"

namespace pmarl::harness {

// State of one agent after a step, with the command that produced it.
struct StepRecord {
  int step = 0;  // 1-based environment step
  int agent = 0;
  sim::VehicleState state;
  sim::ActionCommand action;  // as passed to the environment
  sim::AgentStatus status = sim::AgentStatus::Running;
  reward::RewardBreakdown reward;
};

struct EpisodeRecord {
  int id = 0;
  int level = 1;
  std::uint64_t scenario_seed = 0;
  int length = 0;  // environment steps until both agents were terminal
  std::array<int, sim::kNumAgents> agent_length{};  // steps while each agent was running
  sim::StatusPair status{};
  std::vector<StepRecord> steps;  // only steps where the agent was running beforehand
};

struct EvalResult {
  std::array<MetricsRecord, sim::kNumAgents> metrics;
  std::vector<EpisodeRecord> episodes;  // empty unless recording was requested
};

struct EvalOptions {
  int episodes = 100;
  std::uint64_t seed = 0;
  bool record = false;
};

// Deterministic evaluation: both policies act with their mean action. Each
// episode draws a fresh scenario from a stream seeded by `opts.seed`, so two
// evaluations with the same seed see the same scenarios.
EvalResult evaluate(const tensor::GaussianPolicyHead& left, const tensor::GaussianPolicyHead& right,
                    const marl::EnvironmentSpec& env,
                    const std::array<reward::PersonalityParams, sim::kNumAgents>& personalities,
                    const EvalOptions& opts);

// Re-runs the recorded commands on the scenario regenerated from the record's
// seed and returns the resulting steps in the same layout.
std::vector<StepRecord> replay_episode(const EpisodeRecord& rec, const marl::EnvironmentSpec& env);

void to_json(nlohmann::json& j, const StepRecord& s);
void from_json(const nlohmann::json& j, StepRecord& s);
void to_json(nlohmann::json& j, const EpisodeRecord& e);
void from_json(const nlohmann::json& j, EpisodeRecord& e);

void save_episodes(const std::string& path, const std::vector<EpisodeRecord>& episodes);
std::vector<EpisodeRecord> load_episodes(const std::string& path);

}  // namespace pmarl::harness
