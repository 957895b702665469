#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pmarl/marl/config.hpp"
#include "pmarl/sim/env.hpp"
#include "pmarl/tensor/adam.hpp"
#include "pmarl/tensor/gaussian_policy.hpp"

namespace pmarl::marl {

// Input width of the self critic: own observation, or both for MAPPO.
std::size_t critic_self_input_dim(Variant v);

// Writes the self-critic input for one agent into `out` (resized as needed).
void critic_self_input(Variant v, const sim::Observation& own, const sim::Observation& other,
                       std::vector<double>& out);

// Policy, critics and optimizer state for one agent. Parameters are never
// shared between agents.
struct AgentLearner {
  Variant variant = Variant::PeMN;
  tensor::GaussianPolicyHead policy;
  tensor::MlpParams critic_self;  // the only critic for IPPO and MAPPO
  std::optional<tensor::MlpParams> critic_coop;
  tensor::AdamState policy_opt;
  tensor::AdamState critic_self_opt;
  std::optional<tensor::AdamState> critic_coop_opt;

  // Each network draws from its own stream derived from (seed, agent), so the
  // policy and self critic initialise identically across variants.
  static AgentLearner init(Variant variant, const TrainConfig& cfg, int agent_index);

  double value_self(const sim::Observation& own, const sim::Observation& other) const;
  double value_coop(const sim::Observation& other) const;

  bool operator==(const AgentLearner&) const = default;
};

struct CheckpointMeta {
  std::string seat;  // "left" or "right"
  double alpha = 1.0;
  int update = 0;
  std::int64_t env_steps = 0;
};

// Versioned text document; doubles are written with round-trip precision.
void save_checkpoint(const std::string& path, const AgentLearner& learner, const CheckpointMeta& meta,
                     const TrainConfig& cfg);

// Throws NotFoundError / LoadError.
AgentLearner load_checkpoint(const std::string& path, CheckpointMeta* meta = nullptr);

nlohmann::json mlp_to_json(const tensor::MlpParams& p);
tensor::MlpParams mlp_from_json(const nlohmann::json& j);

}  // namespace pmarl::marl
