#include "pmarl/sim/env.hpp"

#include <algorithm>
#include <cmath>

#include "pmarl/errors.hpp"

namespace pmarl::sim {

std::string_view to_string(AgentStatus s) {
  switch (s) {
    case AgentStatus::Running: return "running";
    case AgentStatus::ReachGoal: return "reach_goal";
    case AgentStatus::Collision: return "collision";
    case AgentStatus::OffRoad: return "offroad";
    case AgentStatus::Timeout: return "timeout";
  }
  return "unknown";
}

AgentStatus status_from_string(std::string_view s) {
  for (auto st : {AgentStatus::Running, AgentStatus::ReachGoal, AgentStatus::Collision,
                  AgentStatus::OffRoad, AgentStatus::Timeout}) {
    if (to_string(st) == s) return st;
  }
  throw LoadError("unknown agent status: " + std::string(s));
}

EnvState reset_state(const ScenarioConfig& config) {
  EnvState st;
  for (int i = 0; i < kNumAgents; ++i) {
    const Pose& p = config.spawn_poses[i];
    st.vehicles[i] = {p.x, p.y, p.heading, 0.0};
  }
  return st;
}

double longitudinal_progress(const ScenarioConfig& config, const VehicleState& state, int agent) {
  const double s = config.centerline.project(state.position()).s;
  return travel_sign(agent) * (config.goal_lines[agent].s - s);
}

namespace {

bool off_road(const Scene& scene, const OrientedRect& body) {
  const auto& cfg = scene.config;
  const double half = 0.5 * cfg.road_width;
  const double len = cfg.centerline.length();
  for (const Vec2& c : body.corners()) {
    const Projection pr = cfg.centerline.project(c);
    if (std::abs(pr.lateral) > half || pr.s < 0.0 || pr.s > len) return true;
  }
  return false;
}

}  // namespace

StepOutcome check_termination(const Scene& scene, const VehiclePair& vehicles,
                              const StatusPair& previous, int step_count) {
  const auto& cfg = scene.config;
  StepOutcome out;
  out.status = previous;
  const std::array<OrientedRect, kNumAgents> bodies{body_rect(vehicles[0]), body_rect(vehicles[1])};
  const bool vehicles_touch = rect_rect_overlap(bodies[0], bodies[1]);

  for (int i = 0; i < kNumAgents; ++i) {
    out.progress[i] = longitudinal_progress(cfg, vehicles[i], i);
    if (is_terminal(previous[i])) continue;

    bool collision = vehicles_touch;
    for (const auto& obs : cfg.obstacles) {
      if (collision) break;
      collision = rect_circle_overlap(bodies[i], obs);
    }
    if (collision) {
      out.status[i] = AgentStatus::Collision;
    } else if (off_road(scene, bodies[i])) {
      out.status[i] = AgentStatus::OffRoad;
    } else if (travel_sign(i) * (cfg.goal_lines[i].s - cfg.centerline.project(front_axle(vehicles[i])).s) <= 0.0) {
      out.status[i] = AgentStatus::ReachGoal;
    } else if (step_count >= cfg.max_steps) {
      out.status[i] = AgentStatus::Timeout;
    }
  }
  out.inter_vehicle_distance = (bodies[0].center - bodies[1].center).norm();
  return out;
}

Observation build_observation(const Scene& scene, const EnvState& state, int agent) {
  const auto& cfg = scene.config;
  const VehicleState& self = state.vehicles[agent];
  const VehicleState& other = state.vehicles[1 - agent];
  Observation obs{};

  const LidarScan scan = cast_lidar(scene, self, other);
  for (std::size_t k = 0; k < kLidarRays; ++k) obs[k] = scan[k] / kLidarRange;

  const double sign = travel_sign(agent);
  const Projection pr = cfg.centerline.project(self.position());
  const double travel_heading = agent == 0 ? pr.heading : pr.heading + std::numbers::pi;
  const double remaining = sign * (cfg.goal_lines[agent].s - pr.s);

  std::size_t k = kLidarRays;
  obs[k++] = self.speed / cfg.v_max;
  obs[k++] = normalize_angle(self.heading - travel_heading) / std::numbers::pi;
  obs[k++] = std::clamp(sign * pr.lateral / (0.5 * cfg.road_width), -1.0, 1.0);
  obs[k++] = std::clamp(remaining / cfg.road_length, -1.0, 1.0);
  obs[k++] = state.prev_action[agent].steer;
  obs[k++] = state.prev_action[agent].accel;
  return obs;
}

EnvStepResult env_step(const Scene& scene, const EnvState& state,
                       const std::array<ActionCommand, kNumAgents>& actions) {
  EnvStepResult result;
  result.state = state;
  if (!state.all_terminal()) {
    for (int i = 0; i < kNumAgents; ++i) {
      if (is_terminal(state.status[i])) continue;
      result.state.vehicles[i] = bicycle_step(state.vehicles[i], actions[i], scene.config.dt, scene.config.v_max);
      ActionCommand applied = actions[i];
      if (std::isnan(applied.steer)) applied.steer = 0.0;
      if (std::isnan(applied.accel)) applied.accel = 0.0;
      result.state.prev_action[i] = clamped(applied);
    }
    result.state.step_count = state.step_count + 1;
    result.outcome = check_termination(scene, result.state.vehicles, state.status, result.state.step_count);
    result.state.status = result.outcome.status;
  } else {
    result.outcome.status = state.status;
    for (int i = 0; i < kNumAgents; ++i) {
      result.outcome.progress[i] = longitudinal_progress(scene.config, state.vehicles[i], i);
    }
    result.outcome.inter_vehicle_distance =
        (body_center(state.vehicles[0]) - body_center(state.vehicles[1])).norm();
  }
  for (int i = 0; i < kNumAgents; ++i) result.observations[i] = build_observation(scene, result.state, i);
  return result;
}

}  // namespace pmarl::sim
