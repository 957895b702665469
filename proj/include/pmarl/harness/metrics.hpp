#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pmarl/sim/env.hpp"

namespace pmarl::harness {

struct MetricsRecord {
  int episodes = 0;
  double success_rate = 0.0;
  double collision_rate = 0.0;
  double offroad_rate = 0.0;
  double timeout_rate = 0.0;
  double safety = 0.0;  // 1 - collision_rate
  double efficiency = 0.0;
  double mean_episode_seconds = 0.0;

  bool operator==(const MetricsRecord&) const = default;
};

// One agent's terminal status per episode plus the total simulated time of
// those episodes. Efficiency is max(0, (successes - collisions - offroads) / seconds);
// timeouts count toward neither side. Throws ContractViolation if any status
// is still Running.
MetricsRecord compute_metrics(std::span<const sim::AgentStatus> statuses, double total_seconds);

// Column names and values in a fixed order, shared by every CSV writer.
const std::vector<std::string>& metrics_columns();
std::vector<double> metrics_values(const MetricsRecord& m);
MetricsRecord metrics_from_values(std::span<const double> values);

void to_json(nlohmann::json& j, const MetricsRecord& m);
void from_json(const nlohmann::json& j, MetricsRecord& m);

}  // namespace pmarl::harness
