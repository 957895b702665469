#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pmarl/sim/geometry.hpp"
#include "pmarl/sim/road.hpp"

namespace pmarl::sim {

inline constexpr int kNumAgents = 2;
inline constexpr int kMinLevel = 1;
inline constexpr int kMaxLevel = 6;

// Tunable scenario constants; the generator derives everything else.
struct ScenarioParams {
  double road_length = 100.0;  // distance between the two spawn points
  double road_width = 7.0;
  double v_max = 8.0;
  double dt = 0.1;
  int max_steps = 600;
  double end_margin = 15.0;     // drivable road beyond each spawn point
  double goal_overshoot = 5.0;  // goal line sits this far past the opposing spawn
  double centerline_resolution = 0.1;
  double curve_radius = 40.0;
  double curve_arc_length = 30.0;
  double min_gap_clearance = 0.4;  // required gap = vehicle width + clearance
  int placement_retries = 64;

  bool operator==(const ScenarioParams&) const = default;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  bool operator==(const Pose&) const = default;
};

// Lateral segment across the road at arc length `s`. The owning agent reaches
// its goal when its front axle passes `s` in its direction of travel.
struct GoalLine {
  Vec2 a;
  Vec2 b;
  double s = 0.0;
  bool operator==(const GoalLine&) const = default;
};

struct ScenarioConfig {
  int level = 1;
  double road_length = 100.0;
  double road_width = 7.0;
  Centerline centerline;
  std::vector<Circle> obstacles;
  std::array<Pose, kNumAgents> spawn_poses{};
  std::array<GoalLine, kNumAgents> goal_lines{};
  double v_max = 8.0;
  double dt = 0.1;
  int max_steps = 600;
  std::uint64_t rng_seed = 0;

  bool operator==(const ScenarioConfig&) const = default;
};

// Agent 0 drives toward increasing arc length, agent 1 toward decreasing.
inline double travel_sign(int agent) { return agent == 0 ? 1.0 : -1.0; }

int obstacle_count_for_level(int level);
bool level_uses_s_curve(int level);

// Deterministic per (level, seed, params). Throws GenerationError when an
// obstacle cannot be placed within the retry budget.
ScenarioConfig generate_scenario(int level, std::uint64_t seed, const ScenarioParams& params = {});

// Obstacle-free scene with the same road, spawns and goals as a generated one.
ScenarioConfig empty_scenario(int level, const ScenarioParams& params = {});

// Smallest "widest free interval" over road cross-sections touched by the
// obstacles, evaluated analytically every `step` metres of arc length.
double min_traversable_gap(const ScenarioConfig& config, double step = 0.02);

// Scene = config plus derived boundary geometry used for ray casting.
struct Scene {
  ScenarioConfig config;
  RoadBoundary boundary;

  Scene() = default;
  explicit Scene(ScenarioConfig cfg);
};

void to_json(nlohmann::json& j, const ScenarioParams& p);
void from_json(const nlohmann::json& j, ScenarioParams& p);
void to_json(nlohmann::json& j, const ScenarioConfig& c);
void from_json(const nlohmann::json& j, ScenarioConfig& c);

void save_scenario(const ScenarioConfig& c, const std::string& path);
ScenarioConfig load_scenario(const std::string& path);

}  // namespace pmarl::sim
