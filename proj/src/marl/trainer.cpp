#include "pmarl/marl/trainer.hpp"

#include "pmarl/errors.hpp"
#include "pmarl/marl/gae.hpp"

namespace pmarl::marl {

Trainer::Trainer(const TrainConfig& cfg, const EnvironmentSpec& env, std::array<bool, sim::kNumAgents> learn,
                 std::array<std::vector<tensor::GaussianPolicyHead>, sim::kNumAgents> background)
    : cfg_(cfg), env_(env), background_(std::move(background)) {
  cfg_.validate();
  for (int i = 0; i < sim::kNumAgents; ++i) {
    if (learn[i]) {
      learners_[i] = AgentLearner::init(cfg_.variant, cfg_, i);
    } else if (background_[i].empty()) {
      throw ConfigError("seat " + std::to_string(i) + " has neither a learner nor a background pool");
    }
  }
  workers_ = make_workers(cfg_);
  std::seed_seq seq{static_cast<std::uint32_t>(cfg_.seed), static_cast<std::uint32_t>(cfg_.seed >> 32),
                    0x70706fu};
  update_rng_ = std::mt19937_64(seq);
}

std::array<Seat, sim::kNumAgents> Trainer::seats() const {
  std::array<Seat, sim::kNumAgents> out;
  for (int i = 0; i < sim::kNumAgents; ++i) {
    out[i].personality = cfg_.personalities[i];
    if (learners_[i]) {
      out[i].learner = &*learners_[i];
    } else {
      for (const auto& p : background_[i]) out[i].pool.push_back(&p);
    }
  }
  return out;
}

UpdateReport Trainer::run_update() {
  RolloutBuffer buffer = collect_rollouts(workers_, seats(), cfg_, env_);
  env_steps_ += buffer.env_steps;
  update_ += 1;

  UpdateReport report;
  report.update = update_;
  report.env_steps = env_steps_;
  report.episodes = static_cast<int>(buffer.episodes.size());
  report.share_breaches = buffer.share_breaches;
  for (const auto& ep : buffer.episodes) {
    report.team_bound_steps += ep.team_bound_exceeded;
    for (int i = 0; i < sim::kNumAgents; ++i) {
      report.mean_return[i] += ep.composed_return[i];
      report.status_counts[i][static_cast<int>(ep.status[i])] += 1;
    }
  }
  if (!buffer.episodes.empty()) {
    for (auto& r : report.mean_return) r /= static_cast<double>(buffer.episodes.size());
  }

  for (int i = 0; i < sim::kNumAgents; ++i) {
    if (!learners_[i]) continue;
    AgentBuffer& ab = buffer.agents[i];
    if (ab.size() == 0) continue;
    compute_advantages(ab, cfg_.variant, cfg_.gamma, cfg_.gae_lambda);
    report.ppo[i] = ppo_update(*learners_[i], ab, cfg_, update_rng_);
  }
  return report;
}

}  // namespace pmarl::marl
