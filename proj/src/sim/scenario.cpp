#include "pmarl/sim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "pmarl/errors.hpp"
#include "pmarl/sim/vehicle.hpp"

namespace pmarl::sim {

namespace {

constexpr int kScenarioFormatVersion = 1;

void check_level(int level) {
  if (level < kMinLevel || level > kMaxLevel) {
    throw ContractViolation("level must be in 1..6, got " + std::to_string(level));
  }
}

Centerline build_centerline(int level, const ScenarioParams& p) {
  const double total = p.road_length + 2.0 * p.end_margin;
  const CurveShape shape = level_uses_s_curve(level)
                               ? s_curve_shape(total, p.curve_radius, p.curve_arc_length)
                               : straight_shape(total);
  if (!level_uses_s_curve(level)) {
    // A straight road needs no intermediate vertices.
    return Centerline({shape.point(0.0), shape.point(total)});
  }
  return sample_centerline(shape, p.centerline_resolution);
}

Pose pose_on_road(const Centerline& c, double s, double lateral, double heading_offset) {
  const Vec2 p = c.point_at(s) + c.left_normal_at(s) * lateral;
  return {p.x, p.y, normalize_angle(c.heading_at(s) + heading_offset)};
}

GoalLine goal_line(const Centerline& c, double s, double width) {
  const Vec2 mid = c.point_at(s);
  const Vec2 n = c.left_normal_at(s);
  return {mid - n * (0.5 * width), mid + n * (0.5 * width), s};
}

// Largest free lateral interval on the cross-section at arc length s.
double widest_gap_at(const ScenarioConfig& cfg, double s) {
  const double half = 0.5 * cfg.road_width;
  const Vec2 mid = cfg.centerline.point_at(s);
  const Vec2 n = cfg.centerline.left_normal_at(s);
  std::vector<std::array<double, 2>> blocked;
  for (const auto& obs : cfg.obstacles) {
    if (auto span = line_circle_interval(mid, n, obs)) {
      const double lo = std::max((*span)[0], -half);
      const double hi = std::min((*span)[1], half);
      if (lo < hi) blocked.push_back({lo, hi});
    }
  }
  std::sort(blocked.begin(), blocked.end());
  double widest = 0.0;
  double cursor = -half;
  for (const auto& b : blocked) {
    widest = std::max(widest, b[0] - cursor);
    cursor = std::max(cursor, b[1]);
  }
  return std::max(widest, half - cursor);
}

ScenarioConfig skeleton(int level, const ScenarioParams& p) {
  check_level(level);
  ScenarioConfig cfg;
  cfg.level = level;
  cfg.road_length = p.road_length;
  cfg.road_width = p.road_width;
  cfg.v_max = p.v_max;
  cfg.dt = p.dt;
  cfg.max_steps = p.max_steps;
  cfg.centerline = build_centerline(level, p);

  const double s0 = p.end_margin;
  const double s1 = p.end_margin + p.road_length;
  const double lane = 0.25 * p.road_width;
  cfg.spawn_poses[0] = pose_on_road(cfg.centerline, s0, -lane, 0.0);
  cfg.spawn_poses[1] = pose_on_road(cfg.centerline, s1, lane, std::numbers::pi);
  cfg.goal_lines[0] = goal_line(cfg.centerline, s1 + p.goal_overshoot, p.road_width);
  cfg.goal_lines[1] = goal_line(cfg.centerline, s0 - p.goal_overshoot, p.road_width);
  return cfg;
}

}  // namespace

int obstacle_count_for_level(int level) {
  check_level(level);
  return 2 * level;
}

bool level_uses_s_curve(int level) {
  check_level(level);
  return level >= 4;
}

ScenarioConfig empty_scenario(int level, const ScenarioParams& params) { return skeleton(level, params); }

ScenarioConfig generate_scenario(int level, std::uint64_t seed, const ScenarioParams& params) {
  ScenarioConfig cfg = skeleton(level, params);
  cfg.rng_seed = seed;

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(level)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit01(0.0, 1.0);

  const int n = obstacle_count_for_level(level);
  const double first = params.end_margin + 15.0;
  const double span = params.road_length - 30.0;
  const double slot = span / n;
  const double half = 0.5 * params.road_width;
  const double required = kVehicle.width + params.min_gap_clearance;
  double side = unit01(rng) < 0.5 ? 1.0 : -1.0;

  for (int k = 0; k < n; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < params.placement_retries && !placed; ++attempt) {
      const double radius = 0.5 + 0.7 * unit01(rng);
      const double s = first + (k + 0.5) * slot + (unit01(rng) - 0.5) * 0.5 * slot;
      const double inset = 0.4 * unit01(rng);
      const double lateral = side * (half - radius - inset);
      const Vec2 center = cfg.centerline.point_at(s) + cfg.centerline.left_normal_at(s) * lateral;
      cfg.obstacles.push_back({center, radius});

      double worst = std::numeric_limits<double>::max();
      for (double q = s - radius - 0.5; q <= s + radius + 0.5; q += 0.02) {
        worst = std::min(worst, widest_gap_at(cfg, q));
      }
      if (worst >= required) {
        placed = true;
      } else {
        cfg.obstacles.pop_back();
      }
    }
    if (!placed) {
      throw GenerationError("generate_scenario: could not place obstacle " + std::to_string(k) +
                            " for level " + std::to_string(level) + ", seed " + std::to_string(seed));
    }
    side = -side;
  }
  return cfg;
}

double min_traversable_gap(const ScenarioConfig& config, double step) {
  double worst = config.road_width;
  for (const auto& obs : config.obstacles) {
    const double s = config.centerline.project(obs.center).s;
    for (double q = s - obs.radius - 0.5; q <= s + obs.radius + 0.5; q += step) {
      worst = std::min(worst, widest_gap_at(config, q));
    }
  }
  return worst;
}

Scene::Scene(ScenarioConfig cfg)
    : config(std::move(cfg)), boundary(config.centerline, config.road_width) {}

void to_json(nlohmann::json& j, const ScenarioParams& p) {
  j = {{"road_length", p.road_length},
       {"road_width", p.road_width},
       {"v_max", p.v_max},
       {"dt", p.dt},
       {"max_steps", p.max_steps},
       {"end_margin", p.end_margin},
       {"goal_overshoot", p.goal_overshoot},
       {"centerline_resolution", p.centerline_resolution},
       {"curve_radius", p.curve_radius},
       {"curve_arc_length", p.curve_arc_length},
       {"min_gap_clearance", p.min_gap_clearance},
       {"placement_retries", p.placement_retries}};
}

void from_json(const nlohmann::json& j, ScenarioParams& p) {
  ScenarioParams d;
  p.road_length = j.value("road_length", d.road_length);
  p.road_width = j.value("road_width", d.road_width);
  p.v_max = j.value("v_max", d.v_max);
  p.dt = j.value("dt", d.dt);
  p.max_steps = j.value("max_steps", d.max_steps);
  p.end_margin = j.value("end_margin", d.end_margin);
  p.goal_overshoot = j.value("goal_overshoot", d.goal_overshoot);
  p.centerline_resolution = j.value("centerline_resolution", d.centerline_resolution);
  p.curve_radius = j.value("curve_radius", d.curve_radius);
  p.curve_arc_length = j.value("curve_arc_length", d.curve_arc_length);
  p.min_gap_clearance = j.value("min_gap_clearance", d.min_gap_clearance);
  p.placement_retries = j.value("placement_retries", d.placement_retries);
}

namespace {

nlohmann::json vec_json(Vec2 v) { return nlohmann::json::array({v.x, v.y}); }
Vec2 json_vec(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

void to_json(nlohmann::json& j, const ScenarioConfig& c) {
  nlohmann::json centerline = nlohmann::json::array();
  for (const auto& p : c.centerline.points()) centerline.push_back(vec_json(p));
  nlohmann::json obstacles = nlohmann::json::array();
  for (const auto& o : c.obstacles) {
    obstacles.push_back({{"center", vec_json(o.center)}, {"radius", o.radius}});
  }
  nlohmann::json spawns = nlohmann::json::array();
  for (const auto& p : c.spawn_poses) spawns.push_back({{"x", p.x}, {"y", p.y}, {"heading", p.heading}});
  nlohmann::json goals = nlohmann::json::array();
  for (const auto& g : c.goal_lines) goals.push_back({{"a", vec_json(g.a)}, {"b", vec_json(g.b)}, {"s", g.s}});
  j = {{"format", "pmarl.scenario"},
       {"version", kScenarioFormatVersion},
       {"level", c.level},
       {"road_length", c.road_length},
       {"road_width", c.road_width},
       {"centerline", centerline},
       {"obstacles", obstacles},
       {"spawn_poses", spawns},
       {"goal_lines", goals},
       {"v_max", c.v_max},
       {"dt", c.dt},
       {"max_steps", c.max_steps},
       {"rng_seed", c.rng_seed}};
}

void from_json(const nlohmann::json& j, ScenarioConfig& c) {
  try {
    if (j.value("format", std::string{}) != "pmarl.scenario") throw LoadError("not a scenario document");
    if (j.at("version").get<int>() != kScenarioFormatVersion) throw LoadError("unsupported scenario version");
    c.level = j.at("level").get<int>();
    check_level(c.level);
    c.road_length = j.at("road_length").get<double>();
    c.road_width = j.at("road_width").get<double>();
    std::vector<Vec2> pts;
    for (const auto& p : j.at("centerline")) pts.push_back(json_vec(p));
    c.centerline = Centerline(std::move(pts));
    c.obstacles.clear();
    for (const auto& o : j.at("obstacles")) {
      c.obstacles.push_back({json_vec(o.at("center")), o.at("radius").get<double>()});
    }
    const auto& spawns = j.at("spawn_poses");
    const auto& goals = j.at("goal_lines");
    if (spawns.size() != kNumAgents || goals.size() != kNumAgents) {
      throw LoadError("scenario must define exactly two spawns and goal lines");
    }
    for (int i = 0; i < kNumAgents; ++i) {
      c.spawn_poses[i] = {spawns[i].at("x").get<double>(), spawns[i].at("y").get<double>(),
                          spawns[i].at("heading").get<double>()};
      c.goal_lines[i] = {json_vec(goals[i].at("a")), json_vec(goals[i].at("b")), goals[i].at("s").get<double>()};
    }
    c.v_max = j.at("v_max").get<double>();
    c.dt = j.at("dt").get<double>();
    c.max_steps = j.at("max_steps").get<int>();
    c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("scenario: ") + e.what());
  } catch (const ContractViolation& e) {
    throw LoadError(std::string("scenario: ") + e.what());
  }
}

void save_scenario(const ScenarioConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << nlohmann::json(c).dump(2) << '\n';
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("scenario file not found: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("scenario: ") + e.what());
  }
  return j.get<ScenarioConfig>();
}

}  // namespace pmarl::sim
