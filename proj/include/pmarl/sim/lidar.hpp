#pragma once

#include <array>

#include "pmarl/sim/scenario.hpp"
#include "pmarl/sim/vehicle.hpp"

namespace pmarl::sim {

inline constexpr std::size_t kLidarRays = 16;
inline constexpr double kLidarRange = 30.0;

using LidarScan = std::array<double, kLidarRays>;

// Rays are evenly spaced over 360 degrees starting along the heading and
// emanate from the body centre. Each reading is the range to the nearest
// obstacle circle, the other vehicle's body or the road boundary, capped at
// kLidarRange. The ego body itself is transparent.
LidarScan cast_lidar(const Scene& scene, const VehicleState& self, const VehicleState& other);

}  // namespace pmarl::sim
