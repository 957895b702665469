#include "pmarl/marl/gae.hpp"

#include <memory>

#include "pmarl/errors.hpp"

namespace pmarl::marl {

void AgentBuffer::clear() {
  transitions.clear();
  segments.clear();
  advantages.clear();
  returns_self.clear();
  returns_coop.clear();
}

void RolloutBuffer::clear() {
  for (auto& a : agents) a.clear();
  episodes.clear();
  env_steps = 0;
  share_breaches = 0;
}

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values, double bootstrap,
                      std::span<const bool> dones, double gamma, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) {
    throw ContractViolation("compute_gae: rewards, values and dones must share a length");
  }
  GaeResult out;
  out.advantages.resize(n);
  out.returns.resize(n);
  double next_value = bootstrap;
  double next_adv = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const double nonterminal = dones[t] ? 0.0 : 1.0;
    const double delta = rewards[t] + gamma * nonterminal * next_value - values[t];
    const double adv = delta + gamma * lambda * nonterminal * next_adv;
    out.advantages[t] = adv;
    out.returns[t] = adv + values[t];
    next_value = values[t];
    next_adv = adv;
  }
  return out;
}

namespace {

struct SegmentStreams {
  std::vector<double> self_r, coop_r, total_r, v_self, v_coop;
  std::unique_ptr<bool[]> dones;

  std::span<const bool> done_span() const { return {dones.get(), self_r.size()}; }
};

SegmentStreams gather(const AgentBuffer& buffer, const Segment& seg) {
  SegmentStreams s;
  s.dones = std::make_unique<bool[]>(seg.end - seg.begin);
  for (std::size_t t = seg.begin; t < seg.end; ++t) {
    const auto& tr = buffer.transitions[t];
    s.self_r.push_back(tr.reward_self_stream);
    s.coop_r.push_back(tr.reward_coop_stream);
    s.total_r.push_back(tr.reward_self_stream + tr.reward_coop_stream);
    s.v_self.push_back(tr.value_self);
    s.v_coop.push_back(tr.value_coop);
    s.dones[t - seg.begin] = tr.done;
  }
  return s;
}

void prepare(AgentBuffer& buffer) {
  const std::size_t n = buffer.transitions.size();
  buffer.advantages.assign(n, 0.0);
  buffer.returns_self.assign(n, 0.0);
  buffer.returns_coop.assign(n, 0.0);
  std::size_t covered = 0;
  for (const auto& seg : buffer.segments) {
    if (seg.begin != covered || seg.end < seg.begin || seg.end > n) {
      throw ContractViolation("advantages: segments must tile the transition array");
    }
    covered = seg.end;
  }
  if (covered != n) throw ContractViolation("advantages: segments must tile the transition array");
}

}  // namespace

void decomposed_advantage(AgentBuffer& buffer, Variant variant, double gamma, double lambda) {
  if (variant != Variant::PeMN) {
    throw ContractViolation("decomposed_advantage: only defined for the PeMN variant");
  }
  prepare(buffer);
  for (const auto& seg : buffer.segments) {
    const auto s = gather(buffer, seg);
    const auto self = compute_gae(s.self_r, s.v_self, seg.bootstrap_self, s.done_span(), gamma, lambda);
    const auto coop = compute_gae(s.coop_r, s.v_coop, seg.bootstrap_coop, s.done_span(), gamma, lambda);
    for (std::size_t k = 0; k < s.self_r.size(); ++k) {
      buffer.advantages[seg.begin + k] = self.advantages[k] + coop.advantages[k];
      buffer.returns_self[seg.begin + k] = self.returns[k];
      buffer.returns_coop[seg.begin + k] = coop.returns[k];
    }
  }
}

void compute_advantages(AgentBuffer& buffer, Variant variant, double gamma, double lambda) {
  if (variant == Variant::PeMN) {
    decomposed_advantage(buffer, variant, gamma, lambda);
    return;
  }
  prepare(buffer);
  for (const auto& seg : buffer.segments) {
    const auto s = gather(buffer, seg);
    const auto total = compute_gae(s.total_r, s.v_self, seg.bootstrap_self, s.done_span(), gamma, lambda);
    for (std::size_t k = 0; k < s.total_r.size(); ++k) {
      buffer.advantages[seg.begin + k] = total.advantages[k];
      buffer.returns_self[seg.begin + k] = total.returns[k];
    }
  }
}

}  // namespace pmarl::marl
