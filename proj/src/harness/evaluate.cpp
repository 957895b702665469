#include "pmarl/harness/evaluate.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "pmarl/errors.hpp"

namespace pmarl::harness {

namespace {

sim::Scene make_scene(int level, std::uint64_t seed, const marl::EnvironmentSpec& env) {
  return sim::Scene(sim::generate_scenario(level, seed, env.scenario));
}

struct EpisodeRun {
  EpisodeRecord record;
  bool keep_steps = false;
};

// Steps the scene with `policy(agent, obs, step)` until both agents are done.
template <typename Policy>
void run_episode(const sim::Scene& scene, const marl::EnvironmentSpec& env,
                 const std::array<reward::PersonalityParams, sim::kNumAgents>& personalities, Policy&& policy,
                 EpisodeRun& run) {
  sim::EnvState state = sim::reset_state(scene.config);
  std::array<sim::Observation, sim::kNumAgents> obs{};
  std::array<double, sim::kNumAgents> progress{};
  for (int i = 0; i < sim::kNumAgents; ++i) {
    obs[i] = sim::build_observation(scene, state, i);
    progress[i] = sim::longitudinal_progress(scene.config, state.vehicles[i], i);
  }
  auto& rec = run.record;
  while (!state.all_terminal()) {
    std::array<sim::ActionCommand, sim::kNumAgents> cmd{};
    std::array<bool, sim::kNumAgents> active{};
    for (int i = 0; i < sim::kNumAgents; ++i) {
      active[i] = !sim::is_terminal(state.status[i]);
      if (active[i]) cmd[i] = policy(i, obs[i], state.step_count);
    }
    const auto step = sim::env_step(scene, state, cmd);
    std::array<reward::AgentStepInput, sim::kNumAgents> inputs{};
    for (int i = 0; i < sim::kNumAgents; ++i) {
      inputs[i] = {active[i], progress[i], step.outcome.progress[i], step.state.vehicles[i].speed,
                   step.outcome.status[i]};
    }
    const auto rewards = reward::step_rewards(env.reward, personalities, scene.config.v_max, inputs,
                                              step.outcome.inter_vehicle_distance);
    for (int i = 0; i < sim::kNumAgents; ++i) {
      if (!active[i]) continue;
      rec.agent_length[i] += 1;
      if (run.keep_steps) {
        rec.steps.push_back({step.state.step_count, i, step.state.vehicles[i], cmd[i], step.outcome.status[i],
                             rewards[i]});
      }
    }
    state = step.state;
    obs = step.observations;
    progress = step.outcome.progress;
  }
  rec.length = state.step_count;
  rec.status = state.status;
}

}  // namespace

EvalResult evaluate(const tensor::GaussianPolicyHead& left, const tensor::GaussianPolicyHead& right,
                    const marl::EnvironmentSpec& env,
                    const std::array<reward::PersonalityParams, sim::kNumAgents>& personalities,
                    const EvalOptions& opts) {
  if (opts.episodes < 1) throw ConfigError("eval.episodes must be at least 1");
  std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                    0x6576616cu};
  std::mt19937_64 rng(seq);
  const std::array<const tensor::GaussianPolicyHead*, sim::kNumAgents> heads{&left, &right};
  auto policy = [&](int agent, const sim::Observation& o, int) {
    const auto a = tensor::mean_action(*heads[agent], o);
    return sim::ActionCommand{a[0], a[1]};
  };

  std::array<std::vector<sim::AgentStatus>, sim::kNumAgents> statuses;
  double seconds = 0.0;
  EvalResult result;
  for (int e = 0; e < opts.episodes; ++e) {
    sim::Scene scene;
    for (int attempt = 0;; ++attempt) {
      const std::uint64_t seed = rng();
      try {
        scene = make_scene(env.level, seed, env);
        break;
      } catch (const GenerationError&) {
        if (attempt + 1 >= 16) throw;
      }
    }
    EpisodeRun run;
    run.keep_steps = opts.record;
    run.record.id = e;
    run.record.level = env.level;
    run.record.scenario_seed = scene.config.rng_seed;
    run_episode(scene, env, personalities, policy, run);
    for (int i = 0; i < sim::kNumAgents; ++i) statuses[i].push_back(run.record.status[i]);
    seconds += run.record.length * scene.config.dt;
    if (opts.record) result.episodes.push_back(std::move(run.record));
  }
  for (int i = 0; i < sim::kNumAgents; ++i) result.metrics[i] = compute_metrics(statuses[i], seconds);
  return result;
}

std::vector<StepRecord> replay_episode(const EpisodeRecord& rec, const marl::EnvironmentSpec& env) {
  const sim::Scene scene = make_scene(rec.level, rec.scenario_seed, env);
  // Commands indexed by (step, agent); agents that were not running get none.
  std::vector<std::array<sim::ActionCommand, sim::kNumAgents>> commands(static_cast<std::size_t>(rec.length) + 1);
  for (const auto& s : rec.steps) {
    if (s.step < 1 || s.step > rec.length || s.agent < 0 || s.agent >= sim::kNumAgents) {
      throw LoadError("episode " + std::to_string(rec.id) + ": step record out of range");
    }
    commands[static_cast<std::size_t>(s.step)][static_cast<std::size_t>(s.agent)] = s.action;
  }
  std::array<reward::PersonalityParams, sim::kNumAgents> personalities{reward::PersonalityParams::selfish(),
                                                                       reward::PersonalityParams::selfish()};
  // Rewards in the replay are recomputed with selfish personalities; only the
  // states are compared against the record.
  EpisodeRun run;
  run.keep_steps = true;
  run.record.id = rec.id;
  run_episode(
      scene, env, personalities,
      [&](int agent, const sim::Observation&, int step_count) {
        const auto k = static_cast<std::size_t>(step_count + 1);
        return k < commands.size() ? commands[k][static_cast<std::size_t>(agent)] : sim::ActionCommand{};
      },
      run);
  return run.record.steps;
}

void to_json(nlohmann::json& j, const StepRecord& s) {
  j = {{"step", s.step},
       {"agent", s.agent},
       {"x", s.state.x},
       {"y", s.state.y},
       {"heading", s.state.heading},
       {"speed", s.state.speed},
       {"steer", s.action.steer},
       {"accel", s.action.accel},
       {"status", sim::to_string(s.status)},
       {"reward", s.reward}};
}

void from_json(const nlohmann::json& j, StepRecord& s) {
  s.step = j.at("step").get<int>();
  s.agent = j.at("agent").get<int>();
  s.state = {j.at("x").get<double>(), j.at("y").get<double>(), j.at("heading").get<double>(),
             j.at("speed").get<double>()};
  s.action = {j.at("steer").get<double>(), j.at("accel").get<double>()};
  s.status = sim::status_from_string(j.at("status").get<std::string>());
  s.reward = {};
  if (!j.contains("reward")) return;  // trajectory exports may omit the breakdown
  const auto& r = j.at("reward");
  s.reward.r_dense = r.at("r_dense").get<double>();
  s.reward.r_sparse = r.at("r_sparse").get<double>();
  s.reward.r_self = r.at("r_self").get<double>();
  s.reward.r_coop = r.at("r_coop").get<double>();
  s.reward.r_self_stream = r.at("r_self_stream").get<double>();
  s.reward.r_total = r.at("r_total").get<double>();
  s.reward.gated = r.at("gated").get<bool>();
}

void to_json(nlohmann::json& j, const EpisodeRecord& e) {
  j = {{"id", e.id},
       {"level", e.level},
       {"scenario_seed", e.scenario_seed},
       {"length", e.length},
       {"agent_length", e.agent_length},
       {"status", {sim::to_string(e.status[0]), sim::to_string(e.status[1])}},
       {"steps", e.steps}};
}

void from_json(const nlohmann::json& j, EpisodeRecord& e) {
  e.id = j.at("id").get<int>();
  e.level = j.at("level").get<int>();
  e.scenario_seed = j.at("scenario_seed").get<std::uint64_t>();
  e.length = j.at("length").get<int>();
  e.agent_length = j.at("agent_length").get<std::array<int, sim::kNumAgents>>();
  const auto& st = j.at("status");
  for (int i = 0; i < sim::kNumAgents; ++i) e.status[i] = sim::status_from_string(st.at(i).get<std::string>());
  e.steps = j.at("steps").get<std::vector<StepRecord>>();
}

void save_episodes(const std::string& path, const std::vector<EpisodeRecord>& episodes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& e : episodes) out << nlohmann::json(e).dump() << '\n';
}

std::vector<EpisodeRecord> load_episodes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("no recorded episodes at " + path);
  std::vector<EpisodeRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<EpisodeRecord>());
    } catch (const std::exception& ex) {
      throw LoadError(path + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return out;
}

}  // namespace pmarl::harness
