#include "pmarl/marl/rollout.hpp"

#include <stdexcept>
#include <thread>

#include "pmarl/errors.hpp"

namespace pmarl::marl {

Worker Worker::create(std::uint64_t base_seed, int worker_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(worker_index), 0x726f6c6cu};
  Worker w;
  w.rng = std::mt19937_64(seq);
  return w;
}

std::vector<Worker> make_workers(const TrainConfig& cfg) {
  std::vector<Worker> out;
  for (int i = 0; i < cfg.workers; ++i) out.push_back(Worker::create(cfg.seed, i));
  return out;
}

void reset_worker(Worker& w, const EnvironmentSpec& env, const std::array<Seat, sim::kNumAgents>& seats) {
  constexpr int kReseedAttempts = 16;
  for (int attempt = 0;; ++attempt) {
    const std::uint64_t seed = w.rng();
    try {
      w.scene = sim::Scene(sim::generate_scenario(env.level, seed, env.scenario));
      break;
    } catch (const GenerationError&) {
      if (attempt + 1 >= kReseedAttempts) throw;
    }
  }
  w.state = sim::reset_state(w.scene.config);
  for (int i = 0; i < sim::kNumAgents; ++i) {
    w.obs[i] = sim::build_observation(w.scene, w.state, i);
    w.progress[i] = sim::longitudinal_progress(w.scene.config, w.state.vehicles[i], i);
    w.pool_choice[i] = 0;
    if (!seats[i].learner && !seats[i].pool.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, seats[i].pool.size() - 1);
      w.pool_choice[i] = pick(w.rng);
    }
  }
  w.episode = EpisodeSummary{};
  w.episode.scenario_seed = w.scene.config.rng_seed;
  w.needs_reset = false;
}

namespace {

void run_worker(Worker& w, int steps, const std::array<Seat, sim::kNumAgents>& seats, const EnvironmentSpec& env,
                RolloutBuffer& out) {
  const std::array<reward::PersonalityParams, sim::kNumAgents> personalities{seats[0].personality,
                                                                           seats[1].personality};
  const std::array<double, sim::kNumAgents> betas{seats[0].personality.beta(), seats[1].personality.beta()};

  for (int t = 0; t < steps; ++t) {
    if (w.needs_reset) reset_worker(w, env, seats);
    const sim::StatusPair prev_status = w.state.status;

    std::array<sim::ActionCommand, sim::kNumAgents> commands{};
    std::array<Transition, sim::kNumAgents> pending{};
    for (int i = 0; i < sim::kNumAgents; ++i) {
      if (sim::is_terminal(prev_status[i])) continue;
      const Seat& seat = seats[i];
      if (seat.learner) {
        const auto sampled = tensor::sample_action(seat.learner->policy, w.obs[i], w.rng);
        auto& tr = pending[i];
        tr.obs_self = w.obs[i];
        tr.obs_others = w.obs[1 - i];
        tr.action = sampled.action;
        tr.logprob = sampled.logprob;
        tr.value_self = seat.learner->value_self(w.obs[i], w.obs[1 - i]);
        tr.value_coop = seat.learner->value_coop(w.obs[1 - i]);
        commands[i] = {sampled.action[0], sampled.action[1]};
      } else if (!seat.pool.empty()) {
        const auto a = tensor::mean_action(*seat.pool[w.pool_choice[i]], w.obs[i]);
        commands[i] = {a[0], a[1]};
      }
    }

    sim::EnvStepResult step;
    try {
      step = sim::env_step(w.scene, w.state, commands);
    } catch (const std::exception& e) {
      throw std::runtime_error("environment fault (scenario seed " + std::to_string(w.scene.config.rng_seed) +
                               ", step " + std::to_string(w.state.step_count) + "): " + e.what());
    }

    std::array<reward::AgentStepInput, sim::kNumAgents> inputs{};
    for (int i = 0; i < sim::kNumAgents; ++i) {
      inputs[i].active = !sim::is_terminal(prev_status[i]);
      inputs[i].prev_progress = w.progress[i];
      inputs[i].new_progress = step.outcome.progress[i];
      inputs[i].speed = step.state.vehicles[i].speed;
      inputs[i].status = step.outcome.status[i];
    }
    const auto rewards = reward::step_rewards(env.reward, personalities, w.scene.config.v_max, inputs,
                                              step.outcome.inter_vehicle_distance);
    const auto audit = reward::team_reward_bound_check(rewards, betas);
    if (!audit.share_ok) out.share_breaches += 1;
    if (!audit.all_within_team_bound()) w.episode.team_bound_exceeded += 1;

    for (int i = 0; i < sim::kNumAgents; ++i) {
      if (!inputs[i].active) continue;
      w.episode.composed_return[i] += rewards[i].r_total;
      if (!seats[i].learner) continue;
      auto& tr = pending[i];
      tr.reward_self_stream = rewards[i].r_self_stream;
      tr.reward_coop_stream = rewards[i].r_coop;
      tr.done = sim::is_terminal(step.outcome.status[i]);
      tr.status = step.outcome.status[i];
      out.agents[i].transitions.push_back(tr);
    }

    w.state = step.state;
    w.obs = step.observations;
    w.progress = step.outcome.progress;
    w.episode.length += 1;
    out.env_steps += 1;
    if (w.state.all_terminal()) {
      w.episode.status = w.state.status;
      out.episodes.push_back(w.episode);
      w.needs_reset = true;
    }
  }

  for (int i = 0; i < sim::kNumAgents; ++i) {
    auto& buf = out.agents[i];
    if (!seats[i].learner || buf.transitions.empty()) continue;
    Segment seg{0, buf.transitions.size(), 0.0, 0.0};
    if (!buf.transitions.back().done) {
      seg.bootstrap_self = seats[i].learner->value_self(w.obs[i], w.obs[1 - i]);
      seg.bootstrap_coop = seats[i].learner->value_coop(w.obs[1 - i]);
    }
    buf.segments.push_back(seg);
  }
}

}  // namespace

RolloutBuffer collect_rollouts(std::vector<Worker>& workers, const std::array<Seat, sim::kNumAgents>& seats,
                               const TrainConfig& cfg, const EnvironmentSpec& env) {
  if (workers.empty()) throw ContractViolation("collect_rollouts: need at least one worker");
  if (cfg.rollout_steps % static_cast<int>(workers.size()) != 0) {
    throw ContractViolation("collect_rollouts: rollout_steps must divide evenly across workers");
  }
  const int per_worker = cfg.rollout_steps / static_cast<int>(workers.size());
  std::vector<RolloutBuffer> partial(workers.size());

  if (workers.size() == 1) {
    run_worker(workers[0], per_worker, seats, env, partial[0]);
  } else {
    std::vector<std::exception_ptr> errors(workers.size());
    std::vector<std::thread> threads;
    for (std::size_t k = 0; k < workers.size(); ++k) {
      threads.emplace_back([&, k] {
        try {
          run_worker(workers[k], per_worker, seats, env, partial[k]);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
    for (auto& th : threads) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  RolloutBuffer merged;
  for (auto& p : partial) {
    for (int i = 0; i < sim::kNumAgents; ++i) {
      auto& dst = merged.agents[i];
      const std::size_t offset = dst.transitions.size();
      dst.transitions.insert(dst.transitions.end(), p.agents[i].transitions.begin(), p.agents[i].transitions.end());
      for (auto seg : p.agents[i].segments) {
        seg.begin += offset;
        seg.end += offset;
        dst.segments.push_back(seg);
      }
    }
    merged.episodes.insert(merged.episodes.end(), p.episodes.begin(), p.episodes.end());
    merged.env_steps += p.env_steps;
    merged.share_breaches += p.share_breaches;
  }
  return merged;
}

}  // namespace pmarl::marl
