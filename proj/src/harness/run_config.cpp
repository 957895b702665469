#include "pmarl/harness/run_config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "pmarl/errors.hpp"

namespace pmarl::harness {

void RunConfig::validate() const {
  if (env.level < sim::kMinLevel || env.level > sim::kMaxLevel) throw ConfigError("scenario.level must be in 1..6");
  if (!(env.scenario.road_length > 0.0)) throw ConfigError("scenario.road_length must be positive");
  if (!(env.scenario.road_width > 0.0)) throw ConfigError("scenario.road_width must be positive");
  if (!(env.scenario.v_max > 0.0)) throw ConfigError("scenario.v_max must be positive");
  if (!(env.scenario.dt > 0.0)) throw ConfigError("scenario.dt must be positive");
  if (env.scenario.max_steps < 1) throw ConfigError("scenario.max_steps must be at least 1");
  if (!(env.reward.gate_distance >= 0.0)) throw ConfigError("reward.gate_distance must be non-negative");
  train.validate();
  if (eval.episodes < 1) throw ConfigError("eval.episodes must be at least 1");
  if (sweep_alphas.empty()) throw ConfigError("sweep.alphas must be non-empty");
  for (double a : sweep_alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("sweep.alphas entries must be in [0, 1]");
  }
  if (out.empty()) throw ConfigError("out must be a directory path");
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  nlohmann::json scenario = c.env.scenario;
  scenario["level"] = c.env.level;
  nlohmann::json train = c.train;
  train.erase("alpha_left");
  train.erase("alpha_right");
  j = {{"format", "pmarl.run"},
       {"version", 1},
       {"scenario", scenario},
       {"reward", c.env.reward},
       {"personality",
        {{"alpha_left", c.train.personalities[0].alpha()}, {"alpha_right", c.train.personalities[1].alpha()}}},
       {"train", train},
       {"eval", {{"episodes", c.eval.episodes}, {"seed", c.eval.seed}, {"record", c.eval.record}}},
       {"sweep", {{"alphas", c.sweep_alphas}}},
       {"background", {{"checkpoints", c.background_checkpoints}}},
       {"out", c.out}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  if (!j.is_object()) throw ConfigError("run config must be an object");
  RunConfig d;
  try {
    if (j.contains("scenario")) {
      const auto& s = j.at("scenario");
      c.env.scenario = s.get<sim::ScenarioParams>();
      c.env.level = s.value("level", d.env.level);
    }
    if (j.contains("reward")) c.env.reward = j.at("reward").get<reward::RewardConfig>();
    if (j.contains("train")) c.train = j.at("train").get<marl::TrainConfig>();
    if (j.contains("personality")) {
      const auto& p = j.at("personality");
      c.train.personalities = {
          reward::PersonalityParams::from_alpha(p.value("alpha_left", c.train.personalities[0].alpha())),
          reward::PersonalityParams::from_alpha(p.value("alpha_right", c.train.personalities[1].alpha()))};
    }
    if (j.contains("eval")) {
      const auto& e = j.at("eval");
      c.eval.episodes = e.value("episodes", d.eval.episodes);
      c.eval.seed = e.value("seed", d.eval.seed);
      c.eval.record = e.value("record", d.eval.record);
    }
    if (j.contains("sweep")) c.sweep_alphas = j.at("sweep").value("alphas", d.sweep_alphas);
    if (j.contains("background")) {
      c.background_checkpoints = j.at("background").value("checkpoints", d.background_checkpoints);
    }
    c.out = j.value("out", d.out);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("config file not found: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  RunConfig c = j.get<RunConfig>();
  c.validate();
  return c;
}

void save_run_config(const RunConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << nlohmann::json(c).dump(2) << '\n';
}

}  // namespace pmarl::harness
