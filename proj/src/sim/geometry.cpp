#include "pmarl/sim/geometry.hpp"

#include <algorithm>
#include <limits>

namespace pmarl::sim {

double normalize_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

std::array<Vec2, 4> OrientedRect::corners() const {
  const Vec2 f = unit(heading) * half_length;
  const Vec2 l = unit(heading + std::numbers::pi / 2.0) * half_width;
  return {center + f + l, center - f + l, center - f - l, center + f - l};
}

std::optional<std::array<double, 2>> line_circle_interval(Vec2 point, Vec2 dir, const Circle& c) {
  const Vec2 oc = point - c.center;
  const double b = oc.dot(dir);
  const double cc = oc.dot(oc) - c.radius * c.radius;
  const double disc = b * b - cc;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  return std::array<double, 2>{-b - root, -b + root};
}

std::optional<double> ray_circle(Vec2 origin, Vec2 dir, const Circle& c) {
  const auto span = line_circle_interval(origin, dir, c);
  if (!span) return std::nullopt;
  if ((*span)[1] < 0.0) return std::nullopt;
  // Origin inside the circle reports contact at zero range.
  return std::max((*span)[0], 0.0);
}

std::optional<double> ray_segment(Vec2 origin, Vec2 dir, const Segment& s) {
  const Vec2 e = s.b - s.a;
  const double denom = dir.cross(e);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const Vec2 w = s.a - origin;
  const double t = w.cross(e) / denom;
  const double u = w.cross(dir) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return t;
}

std::optional<double> ray_rect(Vec2 origin, Vec2 dir, const OrientedRect& r) {
  const auto c = r.corners();
  std::optional<double> best;
  for (std::size_t i = 0; i < 4; ++i) {
    if (auto t = ray_segment(origin, dir, {c[i], c[(i + 1) % 4]})) {
      if (!best || *t < *best) best = t;
    }
  }
  return best;
}

bool rect_circle_overlap(const OrientedRect& r, const Circle& c) {
  const Vec2 local = rotate(c.center - r.center, -r.heading);
  const double cx = std::clamp(local.x, -r.half_length, r.half_length);
  const double cy = std::clamp(local.y, -r.half_width, r.half_width);
  const double dx = local.x - cx, dy = local.y - cy;
  return dx * dx + dy * dy <= c.radius * c.radius;
}

namespace {

// Projection radius of a rect onto a unit axis.
double project_extent(const OrientedRect& r, Vec2 axis) {
  const Vec2 f = unit(r.heading);
  const Vec2 l = unit(r.heading + std::numbers::pi / 2.0);
  return r.half_length * std::abs(f.dot(axis)) + r.half_width * std::abs(l.dot(axis));
}

}  // namespace

bool rect_rect_overlap(const OrientedRect& a, const OrientedRect& b) {
  const Vec2 d = b.center - a.center;
  const std::array<Vec2, 4> axes{unit(a.heading), unit(a.heading + std::numbers::pi / 2.0),
                                 unit(b.heading), unit(b.heading + std::numbers::pi / 2.0)};
  for (const Vec2& axis : axes) {
    if (std::abs(d.dot(axis)) > project_extent(a, axis) + project_extent(b, axis)) return false;
  }
  return true;
}

}  // namespace pmarl::sim
