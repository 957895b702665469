#pragma once

#include <functional>
#include <vector>

#include "pmarl/sim/geometry.hpp"

namespace pmarl::sim {

struct Projection {
  double s = 0.0;        // arc length of the foot point; extrapolated past either end
  double lateral = 0.0;  // signed offset, positive to the left of the +s direction
  double heading = 0.0;  // tangent direction at the foot point
  double distance = 0.0;
};

// Arc-length parameterised piecewise-linear road centerline.
class Centerline {
 public:
  Centerline() = default;
  explicit Centerline(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return points_; }
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

  Projection project(Vec2 p) const;
  Vec2 point_at(double s) const;
  double heading_at(double s) const;
  Vec2 left_normal_at(double s) const { return unit(heading_at(s) + std::numbers::pi / 2.0); }

  bool operator==(const Centerline& o) const { return points_ == o.points_; }

 private:
  std::size_t segment_at(double s) const;

  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
  struct Chunk {
    std::size_t first = 0;
    std::size_t last = 0;  // exclusive, segment indices
    Vec2 center;
    double radius = 0.0;
  };
  std::vector<Chunk> chunks_;
};

// Exact parametric description of the centerline shape, used to sample the
// polyline at any resolution.
struct CurveShape {
  std::function<Vec2(double)> point;
  std::function<double(double)> heading;
  double length = 0.0;
};

CurveShape straight_shape(double length);

// Straight lead-in, a left arc, an equal right arc, straight lead-out. The two
// arcs are centred on the middle of the road.
CurveShape s_curve_shape(double length, double radius, double arc_length);

// Samples `shape` every `resolution` metres (plus the exact end point).
Centerline sample_centerline(const CurveShape& shape, double resolution);

// Segments bounding the drivable area (both edges plus end caps), grouped for
// range culling during ray casts.
class RoadBoundary {
 public:
  RoadBoundary() = default;
  RoadBoundary(const Centerline& centerline, double width, double max_vertex_spacing = 0.5);

  std::optional<double> raycast(Vec2 origin, Vec2 dir, double max_range) const;
  const std::vector<Segment>& segments() const { return segments_; }

 private:
  std::vector<Segment> segments_;
  struct Chunk {
    std::size_t first = 0;
    std::size_t last = 0;
    Vec2 center;
    double radius = 0.0;
  };
  std::vector<Chunk> chunks_;
};

}  // namespace pmarl::sim
