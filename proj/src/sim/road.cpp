#include "pmarl/sim/road.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmarl/errors.hpp"

namespace pmarl::sim {

namespace {

constexpr std::size_t kChunkSize = 32;

template <typename Chunk>
std::vector<Chunk> build_chunks(std::size_t count, const std::function<Segment(std::size_t)>& seg) {
  std::vector<Chunk> chunks;
  for (std::size_t first = 0; first < count; first += kChunkSize) {
    Chunk c;
    c.first = first;
    c.last = std::min(count, first + kChunkSize);
    Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    Vec2 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
    for (std::size_t i = c.first; i < c.last; ++i) {
      const Segment s = seg(i);
      for (Vec2 p : {s.a, s.b}) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
      }
    }
    c.center = (lo + hi) * 0.5;
    c.radius = (hi - lo).norm() * 0.5;
    chunks.push_back(c);
  }
  return chunks;
}

}  // namespace

Centerline::Centerline(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw ContractViolation("Centerline: need at least two points");
  cumulative_.resize(points_.size(), 0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double len = (points_[i] - points_[i - 1]).norm();
    if (len <= 0.0) throw ContractViolation("Centerline: repeated vertex");
    cumulative_[i] = cumulative_[i - 1] + len;
  }
  chunks_ = build_chunks<Chunk>(points_.size() - 1, [this](std::size_t i) {
    return Segment{points_[i], points_[i + 1]};
  });
}

Projection Centerline::project(Vec2 p) const {
  const std::size_t nseg = points_.size() - 1;
  Projection best;
  double best_d2 = std::numeric_limits<double>::max();
  for (const auto& chunk : chunks_) {
    const double lower = std::max(0.0, (p - chunk.center).norm() - chunk.radius);
    // End segments extrapolate, so their chunks can never be skipped.
    const bool has_end = chunk.first == 0 || chunk.last == nseg;
    if (!has_end && lower * lower > best_d2) continue;
    for (std::size_t i = chunk.first; i < chunk.last; ++i) {
      const Vec2 a = points_[i];
      const Vec2 e = points_[i + 1] - a;
      const double len2 = e.dot(e);
      double t = (p - a).dot(e) / len2;
      const double lo = (i == 0) ? -std::numeric_limits<double>::infinity() : 0.0;
      const double hi = (i + 1 == nseg) ? std::numeric_limits<double>::infinity() : 1.0;
      const double tc = std::clamp(t, std::max(lo, 0.0), std::min(hi, 1.0));
      const Vec2 foot_c = a + e * tc;
      const double d2 = (p - foot_c).dot(p - foot_c);
      if (d2 < best_d2) {
        best_d2 = d2;
        t = std::clamp(t, lo, hi);
        const double seg_len = std::sqrt(len2);
        const Vec2 dir = e * (1.0 / seg_len);
        best.s = cumulative_[i] + t * seg_len;
        best.lateral = dir.cross(p - a);
        best.heading = std::atan2(dir.y, dir.x);
        best.distance = std::sqrt(d2);
      }
    }
  }
  return best;
}

std::size_t Centerline::segment_at(double s) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t idx = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  return std::min(idx, points_.size() - 2);
}

Vec2 Centerline::point_at(double s) const {
  const std::size_t i = segment_at(s);
  const double len = cumulative_[i + 1] - cumulative_[i];
  const double t = (s - cumulative_[i]) / len;
  return points_[i] + (points_[i + 1] - points_[i]) * t;
}

double Centerline::heading_at(double s) const {
  const std::size_t i = segment_at(s);
  const Vec2 e = points_[i + 1] - points_[i];
  return std::atan2(e.y, e.x);
}

CurveShape straight_shape(double length) {
  return CurveShape{[](double s) { return Vec2{s, 0.0}; }, [](double) { return 0.0; }, length};
}

CurveShape s_curve_shape(double length, double radius, double arc_length) {
  const double s1 = 0.5 * length - arc_length;
  const double s2 = s1 + arc_length;
  const double s3 = s2 + arc_length;
  const double h1 = arc_length / radius;
  const Vec2 p1{s1 + radius * std::sin(h1), radius * (1.0 - std::cos(h1))};
  const Vec2 c2 = p1 + Vec2{std::sin(h1), -std::cos(h1)} * radius;
  const Vec2 p2 = c2 + Vec2{0.0, radius};  // heading back to zero at the arc end

  auto heading = [=](double s) {
    if (s < s1) return 0.0;
    if (s < s2) return (s - s1) / radius;
    if (s < s3) return h1 - (s - s2) / radius;
    return 0.0;
  };
  auto point = [=](double s) {
    if (s < s1) return Vec2{s, 0.0};
    if (s < s2) {
      const double phi = (s - s1) / radius;
      return Vec2{s1 + radius * std::sin(phi), radius * (1.0 - std::cos(phi))};
    }
    if (s < s3) {
      const double psi = (s - s2) / radius;
      return c2 + Vec2{-std::sin(h1 - psi), std::cos(h1 - psi)} * radius;
    }
    return p2 + Vec2{s - s3, 0.0};
  };
  return CurveShape{point, heading, length};
}

Centerline sample_centerline(const CurveShape& shape, double resolution) {
  if (resolution <= 0.0) throw ContractViolation("sample_centerline: resolution must be positive");
  std::vector<Vec2> pts;
  const auto n = static_cast<std::size_t>(std::floor(shape.length / resolution + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) pts.push_back(shape.point(static_cast<double>(i) * resolution));
  if (shape.length - static_cast<double>(n) * resolution > 1e-9) pts.push_back(shape.point(shape.length));
  return Centerline(std::move(pts));
}

RoadBoundary::RoadBoundary(const Centerline& centerline, double width, double max_vertex_spacing) {
  const double half = 0.5 * width;
  const auto& pts = centerline.points();
  if (pts.size() < 2) return;  // no road: nothing to hit

  // Offset every vertex along the averaged normal, then drop vertices that are
  // collinear with their neighbours or closer than the spacing on curves.
  auto offset_polyline = [&](double side) {
    std::vector<Vec2> out;
    const double len = centerline.length();
    double s = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i > 0) s += (pts[i] - pts[i - 1]).norm();
      double h;
      if (i == 0) {
        h = centerline.heading_at(0.0);
      } else if (i + 1 == pts.size()) {
        h = centerline.heading_at(len);
      } else {
        const Vec2 e0 = pts[i] - pts[i - 1];
        const Vec2 e1 = pts[i + 1] - pts[i];
        h = std::atan2(e0.y, e0.x) + 0.5 * normalize_angle(std::atan2(e1.y, e1.x) - std::atan2(e0.y, e0.x));
      }
      out.push_back(pts[i] + unit(h + std::numbers::pi / 2.0) * (side * half));
    }
    std::vector<Vec2> kept{out.front()};
    for (std::size_t i = 1; i + 1 < out.size(); ++i) {
      const Vec2 a = kept.back();
      const Vec2 b = out[i];
      const Vec2 c = out[i + 1];
      const bool collinear = std::abs((b - a).cross(c - a)) < 1e-9 * (c - a).norm();
      if (collinear) continue;
      if ((c - a).norm() <= max_vertex_spacing) continue;
      kept.push_back(b);
    }
    kept.push_back(out.back());
    return kept;
  };

  const auto left = offset_polyline(1.0);
  const auto right = offset_polyline(-1.0);
  for (std::size_t i = 0; i + 1 < left.size(); ++i) segments_.push_back({left[i], left[i + 1]});
  for (std::size_t i = 0; i + 1 < right.size(); ++i) segments_.push_back({right[i], right[i + 1]});
  segments_.push_back({left.front(), right.front()});
  segments_.push_back({left.back(), right.back()});
  chunks_ = build_chunks<Chunk>(segments_.size(), [this](std::size_t i) { return segments_[i]; });
}

std::optional<double> RoadBoundary::raycast(Vec2 origin, Vec2 dir, double max_range) const {
  std::optional<double> best;
  for (const auto& chunk : chunks_) {
    const double limit = best ? *best : max_range;
    if ((origin - chunk.center).norm() - chunk.radius > limit) continue;
    for (std::size_t i = chunk.first; i < chunk.last; ++i) {
      if (auto t = ray_segment(origin, dir, segments_[i])) {
        if (!best || *t < *best) best = t;
      }
    }
  }
  return best;
}

}  // namespace pmarl::sim
