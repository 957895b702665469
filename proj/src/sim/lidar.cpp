#include "pmarl/sim/lidar.hpp"

#include <algorithm>

namespace pmarl::sim {

LidarScan cast_lidar(const Scene& scene, const VehicleState& self, const VehicleState& other) {
  LidarScan scan;
  const Vec2 origin = body_center(self);
  const OrientedRect other_body = body_rect(other);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(kLidarRays);

  for (std::size_t k = 0; k < kLidarRays; ++k) {
    const Vec2 dir = unit(self.heading + step * static_cast<double>(k));
    double best = kLidarRange;
    for (const auto& obs : scene.config.obstacles) {
      if (auto t = ray_circle(origin, dir, obs)) best = std::min(best, *t);
    }
    if (auto t = ray_rect(origin, dir, other_body)) best = std::min(best, *t);
    if (auto t = scene.boundary.raycast(origin, dir, best)) best = std::min(best, *t);
    scan[k] = best;
  }
  return scan;
}

}  // namespace pmarl::sim
