#include "pmarl/sim/vehicle.hpp"

#include <algorithm>
#include <cmath>

#include "pmarl/errors.hpp"

namespace pmarl::sim {

ActionCommand clamped(ActionCommand cmd) {
  return {std::clamp(cmd.steer, -1.0, 1.0), std::clamp(cmd.accel, -1.0, 1.0)};
}

VehicleState bicycle_step(const VehicleState& state, ActionCommand cmd, double dt, double v_max,
                          const VehicleSpec& spec) {
  if (!(dt > 0.0)) throw ContractViolation("bicycle_step: dt must be positive");
  // NaN commands are treated as zero so a bad policy output cannot poison the state.
  if (std::isnan(cmd.steer)) cmd.steer = 0.0;
  if (std::isnan(cmd.accel)) cmd.accel = 0.0;
  const ActionCommand c = clamped(cmd);
  const double delta = c.steer * spec.max_steer;
  const double accel = c.accel * spec.max_accel;

  VehicleState next = state;
  next.x = state.x + state.speed * std::cos(state.heading) * dt;
  next.y = state.y + state.speed * std::sin(state.heading) * dt;
  next.heading = normalize_angle(state.heading + state.speed / spec.wheelbase * std::tan(delta) * dt);
  next.speed = std::clamp(state.speed + accel * dt, 0.0, v_max);
  return next;
}

Vec2 body_center(const VehicleState& state, const VehicleSpec& spec) {
  return state.position() + unit(state.heading) * (0.5 * spec.wheelbase);
}

Vec2 front_axle(const VehicleState& state, const VehicleSpec& spec) {
  return state.position() + unit(state.heading) * spec.wheelbase;
}

OrientedRect body_rect(const VehicleState& state, const VehicleSpec& spec) {
  return {body_center(state, spec), state.heading, 0.5 * spec.length, 0.5 * spec.width};
}

}  // namespace pmarl::sim
