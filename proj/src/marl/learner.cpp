#include "pmarl/marl/learner.hpp"

#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "pmarl/errors.hpp"

namespace pmarl::marl {

namespace {

constexpr int kCheckpointVersion = 1;

std::mt19937_64 stream_rng(std::uint64_t seed, int agent, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(agent), tag};
  return std::mt19937_64(seq);
}

std::vector<std::size_t> critic_sizes(std::size_t input, const std::vector<std::size_t>& hidden) {
  std::vector<std::size_t> sizes{input};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return sizes;
}

nlohmann::json adam_to_json(const tensor::AdamState& s) {
  return {{"step", s.step}, {"lr", s.lr}, {"beta1", s.beta1}, {"beta2", s.beta2},
          {"eps", s.eps},   {"m", s.m},   {"v", s.v}};
}

tensor::AdamState adam_from_json(const nlohmann::json& j) {
  tensor::AdamState s;
  s.step = j.at("step").get<std::uint64_t>();
  s.lr = j.at("lr").get<double>();
  s.beta1 = j.at("beta1").get<double>();
  s.beta2 = j.at("beta2").get<double>();
  s.eps = j.at("eps").get<double>();
  s.m = j.at("m").get<std::vector<tensor::Vector>>();
  s.v = j.at("v").get<std::vector<tensor::Vector>>();
  return s;
}

void check_adam_shape(const tensor::AdamState& s, std::span<const tensor::ParamView> views, const char* name) {
  if (s.m.size() != views.size() || s.v.size() != views.size()) {
    throw LoadError(std::string("checkpoint: optimizer ") + name + " does not match its network");
  }
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (s.m[i].size() != views[i].values.size() || s.v[i].size() != views[i].values.size()) {
      throw LoadError(std::string("checkpoint: optimizer ") + name + " buffer " + views[i].name + " has wrong size");
    }
  }
}

}  // namespace

std::size_t critic_self_input_dim(Variant v) {
  return v == Variant::MAPPO ? 2 * sim::kObsDim : sim::kObsDim;
}

void critic_self_input(Variant v, const sim::Observation& own, const sim::Observation& other,
                       std::vector<double>& out) {
  out.assign(own.begin(), own.end());
  if (v == Variant::MAPPO) out.insert(out.end(), other.begin(), other.end());
}

AgentLearner AgentLearner::init(Variant variant, const TrainConfig& cfg, int agent_index) {
  AgentLearner l;
  l.variant = variant;
  auto policy_rng = stream_rng(cfg.seed, agent_index, 1);
  auto self_rng = stream_rng(cfg.seed, agent_index, 2);
  auto coop_rng = stream_rng(cfg.seed, agent_index, 3);
  l.policy = tensor::GaussianPolicyHead::init(sim::kObsDim, cfg.hidden_sizes, cfg.initial_log_std, policy_rng);
  l.critic_self = tensor::MlpParams::init_uniform(critic_sizes(critic_self_input_dim(variant), cfg.hidden_sizes), self_rng);
  l.policy_opt = tensor::AdamState::for_params(l.policy.views(), cfg.lr);
  l.critic_self_opt = tensor::AdamState::for_params(l.critic_self.views(""), cfg.lr);
  if (variant == Variant::PeMN) {
    l.critic_coop = tensor::MlpParams::init_uniform(critic_sizes(sim::kObsDim, cfg.hidden_sizes), coop_rng);
    l.critic_coop_opt = tensor::AdamState::for_params(l.critic_coop->views(""), cfg.lr);
  }
  return l;
}

double AgentLearner::value_self(const sim::Observation& own, const sim::Observation& other) const {
  std::vector<double> in;
  critic_self_input(variant, own, other, in);
  return tensor::mlp_forward(critic_self, in)[0];
}

double AgentLearner::value_coop(const sim::Observation& other) const {
  if (!critic_coop) return 0.0;
  return tensor::mlp_forward(*critic_coop, other)[0];
}

nlohmann::json mlp_to_json(const tensor::MlpParams& p) {
  nlohmann::json weights = nlohmann::json::array();
  for (const auto& w : p.weights) weights.push_back(w.data);
  return {{"layer_sizes", p.layer_sizes}, {"hidden_activation", "tanh"}, {"output_activation", "identity"},
          {"weights", weights}, {"biases", p.biases}};
}

tensor::MlpParams mlp_from_json(const nlohmann::json& j) {
  auto sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
  tensor::MlpParams p = tensor::MlpParams::zeros(sizes);
  const auto& weights = j.at("weights");
  const auto& biases = j.at("biases");
  if (weights.size() != p.num_layers() || biases.size() != p.num_layers()) {
    throw LoadError("checkpoint: layer count does not match layer_sizes");
  }
  for (std::size_t i = 0; i < p.num_layers(); ++i) {
    auto w = weights[i].get<std::vector<double>>();
    auto b = biases[i].get<std::vector<double>>();
    if (w.size() != p.weights[i].size() || b.size() != p.biases[i].size()) {
      throw LoadError("checkpoint: layer " + std::to_string(i) + " has wrong parameter count");
    }
    p.weights[i].data = std::move(w);
    p.biases[i] = std::move(b);
  }
  return p;
}

void save_checkpoint(const std::string& path, const AgentLearner& learner, const CheckpointMeta& meta,
                     const TrainConfig& cfg) {
  nlohmann::json j;
  j["format"] = "pmarl.checkpoint";
  j["version"] = kCheckpointVersion;
  j["seat"] = meta.seat;
  j["alpha"] = meta.alpha;
  j["update"] = meta.update;
  j["env_steps"] = meta.env_steps;
  j["variant"] = to_string(learner.variant);
  j["obs_dim"] = sim::kObsDim;
  j["policy"] = {{"mean_net", mlp_to_json(learner.policy.mean_net)},
                 {"log_std", std::vector<double>(learner.policy.log_std.begin(), learner.policy.log_std.end())}};
  j["critic_self"] = mlp_to_json(learner.critic_self);
  j["critic_coop"] = learner.critic_coop ? mlp_to_json(*learner.critic_coop) : nlohmann::json(nullptr);
  j["optimizer"] = {{"policy", adam_to_json(learner.policy_opt)},
                    {"critic_self", adam_to_json(learner.critic_self_opt)},
                    {"critic_coop", learner.critic_coop_opt ? adam_to_json(*learner.critic_coop_opt)
                                                            : nlohmann::json(nullptr)}};
  j["train_config"] = cfg;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  out << j.dump(1) << '\n';
}

AgentLearner load_checkpoint(const std::string& path, CheckpointMeta* meta) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("checkpoint not found: " + path);
  try {
    nlohmann::json j;
    in >> j;
    if (j.value("format", std::string{}) != "pmarl.checkpoint") throw LoadError("not a checkpoint: " + path);
    if (j.at("version").get<int>() != kCheckpointVersion) throw LoadError("unsupported checkpoint version: " + path);
    if (j.at("obs_dim").get<std::size_t>() != sim::kObsDim) throw LoadError("checkpoint observation size mismatch");

    AgentLearner l;
    l.variant = variant_from_string(j.at("variant").get<std::string>());
    l.policy.mean_net = mlp_from_json(j.at("policy").at("mean_net"));
    const auto log_std = j.at("policy").at("log_std").get<std::vector<double>>();
    if (log_std.size() != tensor::kActionDim) throw LoadError("checkpoint: log_std must have 2 entries");
    l.policy.log_std = {log_std[0], log_std[1]};
    if (l.policy.mean_net.input_size() != sim::kObsDim || l.policy.mean_net.output_size() != tensor::kActionDim) {
      throw LoadError("checkpoint: policy shape mismatch");
    }
    l.critic_self = mlp_from_json(j.at("critic_self"));
    if (l.critic_self.input_size() != critic_self_input_dim(l.variant)) {
      throw LoadError("checkpoint: critic input size does not match variant");
    }
    if (!j.at("critic_coop").is_null()) l.critic_coop = mlp_from_json(j.at("critic_coop"));
    if (l.variant == Variant::PeMN && !l.critic_coop) throw LoadError("checkpoint: PeMN needs a cooperation critic");

    const auto& opt = j.at("optimizer");
    l.policy_opt = adam_from_json(opt.at("policy"));
    check_adam_shape(l.policy_opt, l.policy.views(), "policy");
    l.critic_self_opt = adam_from_json(opt.at("critic_self"));
    check_adam_shape(l.critic_self_opt, l.critic_self.views(""), "critic_self");
    if (l.critic_coop) {
      l.critic_coop_opt = adam_from_json(opt.at("critic_coop"));
      check_adam_shape(*l.critic_coop_opt, l.critic_coop->views(""), "critic_coop");
    }
    if (meta) {
      meta->seat = j.value("seat", std::string{});
      meta->alpha = j.value("alpha", 1.0);
      meta->update = j.value("update", 0);
      meta->env_steps = j.value("env_steps", std::int64_t{0});
    }
    return l;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("checkpoint " + path + ": " + e.what());
  } catch (const ConfigError& e) {
    throw LoadError("checkpoint " + path + ": " + e.what());
  } catch (const ContractViolation& e) {
    throw LoadError("checkpoint " + path + ": " + e.what());
  }
}

}  // namespace pmarl::marl
