#pragma once

#include <array>
#include <string>
#include <string_view>

#include "pmarl/sim/lidar.hpp"
#include "pmarl/sim/scenario.hpp"
#include "pmarl/sim/vehicle.hpp"

namespace pmarl::sim {

enum class AgentStatus { Running, ReachGoal, Collision, OffRoad, Timeout };

inline bool is_terminal(AgentStatus s) { return s != AgentStatus::Running; }
std::string_view to_string(AgentStatus s);
AgentStatus status_from_string(std::string_view s);

using StatusPair = std::array<AgentStatus, kNumAgents>;
using VehiclePair = std::array<VehicleState, kNumAgents>;

struct StepOutcome {
  StatusPair status{AgentStatus::Running, AgentStatus::Running};
  std::array<double, kNumAgents> progress{};  // metres remaining to each goal line
  double inter_vehicle_distance = 0.0;        // between body centres
};

// 16 normalised lidar ranges followed by
// [speed/v_max, heading error/pi, lateral offset/(width/2), remaining/road_length,
//  previous steer, previous accel]. Lateral offset is positive to the left of
// the agent's direction of travel.
inline constexpr std::size_t kObsDim = kLidarRays + 6;
using Observation = std::array<double, kObsDim>;

struct EnvState {
  VehiclePair vehicles{};
  StatusPair status{AgentStatus::Running, AgentStatus::Running};
  std::array<ActionCommand, kNumAgents> prev_action{};
  int step_count = 0;

  bool all_terminal() const { return is_terminal(status[0]) && is_terminal(status[1]); }
};

EnvState reset_state(const ScenarioConfig& config);

// Arc length from the projection of the vehicle reference point to the agent's
// goal line, measured along its direction of travel.
double longitudinal_progress(const ScenarioConfig& config, const VehicleState& state, int agent);

// Terminal statuses in `previous` are kept. For running agents the priority on
// simultaneous events is Collision > OffRoad > ReachGoal > Timeout.
StepOutcome check_termination(const Scene& scene, const VehiclePair& vehicles,
                              const StatusPair& previous, int step_count);

Observation build_observation(const Scene& scene, const EnvState& state, int agent);

struct EnvStepResult {
  EnvState state;
  std::array<Observation, kNumAgents> observations{};
  StepOutcome outcome;
};

// Synchronous update of both vehicles, then the termination check, then the
// observations. Agents already terminal stay frozen.
EnvStepResult env_step(const Scene& scene, const EnvState& state,
                       const std::array<ActionCommand, kNumAgents>& actions);

}  // namespace pmarl::sim
