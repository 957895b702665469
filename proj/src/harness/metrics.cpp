#include "pmarl/harness/metrics.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "pmarl/errors.hpp"

namespace pmarl::harness {

MetricsRecord compute_metrics(std::span<const sim::AgentStatus> statuses, double total_seconds) {
  MetricsRecord m;
  m.episodes = static_cast<int>(statuses.size());
  if (statuses.empty()) return m;
  int success = 0, collision = 0, offroad = 0, timeout = 0;
  for (auto s : statuses) {
    switch (s) {
      case sim::AgentStatus::ReachGoal: ++success; break;
      case sim::AgentStatus::Collision: ++collision; break;
      case sim::AgentStatus::OffRoad: ++offroad; break;
      case sim::AgentStatus::Timeout: ++timeout; break;
      case sim::AgentStatus::Running:
        throw ContractViolation("compute_metrics: episode ended with a running agent");
    }
  }
  const double n = static_cast<double>(m.episodes);
  m.success_rate = success / n;
  m.collision_rate = collision / n;
  m.offroad_rate = offroad / n;
  // Derived so the four rates sum to 1 regardless of rounding in the divisions.
  m.timeout_rate = 1.0 - m.success_rate - m.collision_rate - m.offroad_rate;
  if (timeout == 0) m.timeout_rate = 0.0;
  m.safety = 1.0 - m.collision_rate;
  const double net = static_cast<double>(success - collision - offroad);
  m.efficiency = total_seconds > 0.0 ? std::max(0.0, net / total_seconds) : 0.0;
  m.mean_episode_seconds = total_seconds / n;
  return m;
}

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols{"episodes",     "success_rate", "collision_rate",
                                             "offroad_rate", "timeout_rate", "safety",
                                             "efficiency",   "mean_episode_seconds"};
  return cols;
}

std::vector<double> metrics_values(const MetricsRecord& m) {
  return {static_cast<double>(m.episodes), m.success_rate, m.collision_rate, m.offroad_rate,
          m.timeout_rate, m.safety, m.efficiency, m.mean_episode_seconds};
}

MetricsRecord metrics_from_values(std::span<const double> v) {
  if (v.size() != metrics_columns().size()) throw LoadError("metrics row: wrong number of values");
  MetricsRecord m;
  m.episodes = static_cast<int>(v[0]);
  m.success_rate = v[1];
  m.collision_rate = v[2];
  m.offroad_rate = v[3];
  m.timeout_rate = v[4];
  m.safety = v[5];
  m.efficiency = v[6];
  m.mean_episode_seconds = v[7];
  return m;
}

void to_json(nlohmann::json& j, const MetricsRecord& m) {
  j = nlohmann::json::object();
  const auto vals = metrics_values(m);
  for (std::size_t i = 0; i < vals.size(); ++i) j[metrics_columns()[i]] = vals[i];
  j["episodes"] = m.episodes;
}

void from_json(const nlohmann::json& j, MetricsRecord& m) {
  std::vector<double> vals;
  for (const auto& c : metrics_columns()) vals.push_back(j.at(c).get<double>());
  m = metrics_from_values(vals);
}

}  // namespace pmarl::harness
