#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pmarl/marl/config.hpp"
#include "pmarl/marl/rollout.hpp"

namespace pmarl::harness {

struct EvalSettings {
  int episodes = 100;
  std::uint64_t seed = 20240;
  bool record = false;  // keep per-step records in episodes.jsonl
  bool operator==(const EvalSettings&) const = default;
};

// Everything a command needs, echoed into each output directory as config.json.
// Sections: scenario (level plus generator constants), reward, personality,
// train, eval, sweep, background, out.
struct RunConfig {
  marl::EnvironmentSpec env;
  marl::TrainConfig train;
  EvalSettings eval;
  std::vector<double> sweep_alphas{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  // When non-empty, `train` fits only the left seat against these frozen
  // right-seat policies, one drawn per episode.
  std::vector<std::string> background_checkpoints;
  std::string out = "runs/default";

  // Throws ConfigError naming the offending field.
  void validate() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

RunConfig load_run_config(const std::string& path);
void save_run_config(const RunConfig& c, const std::string& path);

}  // namespace pmarl::harness
