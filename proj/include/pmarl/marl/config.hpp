#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pmarl/reward/reward.hpp"

namespace pmarl::marl {

// IPPO: one critic per agent on its own observation.
// MAPPO: one critic per agent on the concatenated joint observation.
// PeMN: a self critic on the own observation and a cooperation critic on the
//       other agent's observation, trained on separate reward streams.
enum class Variant { IPPO, MAPPO, PeMN };

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view s);

struct TrainConfig {
  double gamma = 0.9;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  double lr = 1e-4;
  int rollout_steps = 2048;  // environment steps per update, summed over workers
  int epochs = 10;
  int minibatch = 256;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  double max_grad_norm = 0.5;  // global-norm clip per network; <= 0 disables
  int workers = 1;
  std::uint64_t seed = 0;
  Variant variant = Variant::PeMN;
  std::array<reward::PersonalityParams, 2> personalities{reward::PersonalityParams::from_alpha(0.2),
                                                         reward::PersonalityParams::from_alpha(0.2)};
  std::int64_t total_steps = 300'000;  // environment-step budget
  std::vector<std::size_t> hidden_sizes{64, 64};
  double initial_log_std = -0.5;
  int checkpoint_every = 0;  // updates between periodic checkpoints; 0 = only initial/final

  // Throws ConfigError naming the first invalid field.
  void validate() const;
  int num_updates() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

}  // namespace pmarl::marl
