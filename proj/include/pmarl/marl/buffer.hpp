#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "pmarl/sim/env.hpp"
#include "pmarl/tensor/gaussian_policy.hpp"

namespace pmarl::marl {

struct Transition {
  sim::Observation obs_self{};
  sim::Observation obs_others{};  // the other agent's observation
  tensor::Action action{};        // raw sample, before the environment clamps it
  double logprob = 0.0;
  double reward_self_stream = 0.0;
  double reward_coop_stream = 0.0;
  double value_self = 0.0;
  double value_coop = 0.0;  // always 0 outside PeMN
  bool done = false;
  sim::AgentStatus status = sim::AgentStatus::Running;

  bool operator==(const Transition&) const = default;
};

// Contiguous run of one agent's transitions collected by one worker. A run
// can span several episodes (separated by done flags); the bootstrap values
// estimate the state after the last transition and are 0 if it was terminal.
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
  double bootstrap_self = 0.0;
  double bootstrap_coop = 0.0;

  bool operator==(const Segment&) const = default;
};

struct AgentBuffer {
  std::vector<Transition> transitions;
  std::vector<Segment> segments;
  std::vector<double> advantages;
  std::vector<double> returns_self;
  std::vector<double> returns_coop;

  std::size_t size() const { return transitions.size(); }
  bool has_advantages() const { return advantages.size() == transitions.size() && !transitions.empty(); }
  void clear();
  bool operator==(const AgentBuffer&) const = default;
};

struct EpisodeSummary {
  std::uint64_t scenario_seed = 0;
  int length = 0;  // environment steps
  sim::StatusPair status{};
  std::array<double, sim::kNumAgents> composed_return{};
  int team_bound_exceeded = 0;  // steps where a cooperative share exceeded the team dense sum

  bool operator==(const EpisodeSummary&) const = default;
};

struct RolloutBuffer {
  std::array<AgentBuffer, sim::kNumAgents> agents;
  std::vector<EpisodeSummary> episodes;  // finished during this rollout
  std::int64_t env_steps = 0;
  int share_breaches = 0;  // reward-plumbing audit failures; should stay 0

  void clear();
  bool operator==(const RolloutBuffer&) const = default;
};

}  // namespace pmarl::marl
