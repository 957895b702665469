#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>

namespace pmarl::sim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  bool operator==(const Vec2&) const = default;
};

inline Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// Wraps to (-pi, pi].
double normalize_angle(double angle);

struct Circle {
  Vec2 center;
  double radius = 0.0;
  bool operator==(const Circle&) const = default;
};

struct Segment {
  Vec2 a;
  Vec2 b;
};

struct OrientedRect {
  Vec2 center;
  double heading = 0.0;
  double half_length = 0.0;
  double half_width = 0.0;

  // Counter-clockwise starting at front-left.
  std::array<Vec2, 4> corners() const;
};

// Distance along a unit-direction ray to the first hit, if any (t >= 0).
std::optional<double> ray_circle(Vec2 origin, Vec2 dir, const Circle& c);
std::optional<double> ray_segment(Vec2 origin, Vec2 dir, const Segment& s);
std::optional<double> ray_rect(Vec2 origin, Vec2 dir, const OrientedRect& r);

bool rect_circle_overlap(const OrientedRect& r, const Circle& c);
bool rect_rect_overlap(const OrientedRect& a, const OrientedRect& b);

// Line through `point` along unit direction `dir`, intersected with the circle.
// Returns parameter interval [t0, t1] (t0 <= t1) if the line meets the circle.
std::optional<std::array<double, 2>> line_circle_interval(Vec2 point, Vec2 dir, const Circle& c);

}  // namespace pmarl::sim
