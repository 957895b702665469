#pragma once

#include <numbers>

#include "pmarl/sim/geometry.hpp"

namespace pmarl::sim {

// Passenger-car footprint. The state reference point is the rear-axle midpoint;
// the body rectangle is centred halfway between the axles.
struct VehicleSpec {
  double length = 4.5;
  double width = 1.8;
  double wheelbase = 2.8;
  double max_steer = 35.0 * std::numbers::pi / 180.0;
  double max_accel = 3.0;
};

inline constexpr VehicleSpec kVehicle{};

struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // (-pi, pi]
  double speed = 0.0;    // [0, v_max]

  Vec2 position() const { return {x, y}; }
  bool operator==(const VehicleState&) const = default;
};

// Normalised command; each channel is clamped to [-1, 1] before use.
struct ActionCommand {
  double steer = 0.0;
  double accel = 0.0;
  bool operator==(const ActionCommand&) const = default;
};

ActionCommand clamped(ActionCommand cmd);

// Kinematic bicycle update (rear-axle reference, explicit Euler):
//   x += v cos(th) dt, y += v sin(th) dt, th += v / L tan(delta) dt,
//   v = clamp(v + a dt, 0, v_max).
VehicleState bicycle_step(const VehicleState& state, ActionCommand cmd, double dt, double v_max,
                          const VehicleSpec& spec = kVehicle);

OrientedRect body_rect(const VehicleState& state, const VehicleSpec& spec = kVehicle);
Vec2 body_center(const VehicleState& state, const VehicleSpec& spec = kVehicle);
Vec2 front_axle(const VehicleState& state, const VehicleSpec& spec = kVehicle);

}  // namespace pmarl::sim
