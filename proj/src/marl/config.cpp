#include "pmarl/marl/config.hpp"

#include <nlohmann/json.hpp>

#include "pmarl/errors.hpp"

namespace pmarl::marl {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::IPPO: return "ippo";
    case Variant::MAPPO: return "mappo";
    case Variant::PeMN: return "pemn";
  }
  return "unknown";
}

Variant variant_from_string(std::string_view s) {
  for (auto v : {Variant::IPPO, Variant::MAPPO, Variant::PeMN}) {
    if (to_string(v) == s) return v;
  }
  throw ConfigError("variant: expected one of ippo, mappo, pemn; got '" + std::string(s) + "'");
}

void TrainConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("train.gamma must be in (0, 1)");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) throw ConfigError("train.gae_lambda must be in [0, 1]");
  if (!(clip_eps > 0.0)) throw ConfigError("train.clip_eps must be positive");
  if (!(lr > 0.0)) throw ConfigError("train.lr must be positive");
  if (rollout_steps < 0) throw ConfigError("train.rollout_steps must be non-negative");
  if (minibatch <= 0) throw ConfigError("train.minibatch must be positive");
  if (rollout_steps % minibatch != 0) throw ConfigError("train.rollout_steps must be divisible by train.minibatch");
  if (epochs <= 0) throw ConfigError("train.epochs must be positive");
  if (workers <= 0) throw ConfigError("train.workers must be positive");
  if (rollout_steps % workers != 0) throw ConfigError("train.rollout_steps must be divisible by train.workers");
  if (total_steps < 0) throw ConfigError("train.total_steps must be non-negative");
  if (total_steps > 0 && rollout_steps == 0) throw ConfigError("train.rollout_steps must be positive to train");
  if (value_coef < 0.0) throw ConfigError("train.value_coef must be non-negative");
  if (entropy_coef < 0.0) throw ConfigError("train.entropy_coef must be non-negative");
  if (hidden_sizes.empty()) throw ConfigError("train.hidden_sizes must be non-empty");
  for (auto h : hidden_sizes) {
    if (h == 0) throw ConfigError("train.hidden_sizes entries must be positive");
  }
  if (checkpoint_every < 0) throw ConfigError("train.checkpoint_every must be non-negative");
}

int TrainConfig::num_updates() const {
  if (rollout_steps == 0) return 0;
  return static_cast<int>(total_steps / rollout_steps);
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"gamma", c.gamma},
       {"gae_lambda", c.gae_lambda},
       {"clip_eps", c.clip_eps},
       {"lr", c.lr},
       {"rollout_steps", c.rollout_steps},
       {"epochs", c.epochs},
       {"minibatch", c.minibatch},
       {"value_coef", c.value_coef},
       {"entropy_coef", c.entropy_coef},
       {"max_grad_norm", c.max_grad_norm},
       {"workers", c.workers},
       {"seed", c.seed},
       {"variant", to_string(c.variant)},
       {"alpha_left", c.personalities[0].alpha()},
       {"alpha_right", c.personalities[1].alpha()},
       {"total_steps", c.total_steps},
       {"hidden_sizes", c.hidden_sizes},
       {"initial_log_std", c.initial_log_std},
       {"checkpoint_every", c.checkpoint_every}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  TrainConfig d;
  try {
    c.gamma = j.value("gamma", d.gamma);
    c.gae_lambda = j.value("gae_lambda", d.gae_lambda);
    c.clip_eps = j.value("clip_eps", d.clip_eps);
    c.lr = j.value("lr", d.lr);
    c.rollout_steps = j.value("rollout_steps", d.rollout_steps);
    c.epochs = j.value("epochs", d.epochs);
    c.minibatch = j.value("minibatch", d.minibatch);
    c.value_coef = j.value("value_coef", d.value_coef);
    c.entropy_coef = j.value("entropy_coef", d.entropy_coef);
    c.max_grad_norm = j.value("max_grad_norm", d.max_grad_norm);
    c.workers = j.value("workers", d.workers);
    c.seed = j.value("seed", d.seed);
    c.variant = variant_from_string(j.value("variant", std::string(to_string(d.variant))));
    c.personalities = {reward::PersonalityParams::from_alpha(j.value("alpha_left", d.personalities[0].alpha())),
                       reward::PersonalityParams::from_alpha(j.value("alpha_right", d.personalities[1].alpha()))};
    c.total_steps = j.value("total_steps", d.total_steps);
    c.hidden_sizes = j.value("hidden_sizes", d.hidden_sizes);
    c.initial_log_std = j.value("initial_log_std", d.initial_log_std);
    c.checkpoint_every = j.value("checkpoint_every", d.checkpoint_every);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
}

}  // namespace pmarl::marl
