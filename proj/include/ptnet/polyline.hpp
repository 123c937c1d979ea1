#pragma once

#include <vector>

#include "ptnet/types.hpp"

namespace ptnet {

/// An arc-length-parameterized open polyline. Consecutive duplicate points
/// (closer than kMinSegment) are dropped on construction; fewer than two
/// distinct points is a DegeneratePathError.
class Polyline {
 public:
  static constexpr double kMinSegment = 1e-9;

  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return pts_; }
  const std::vector<double>& cumulative_arclength() const { return cum_; }
  double length() const { return cum_.back(); }
  int segment_count() const { return static_cast<int>(pts_.size()) - 1; }

  /// Point at arc length s, clamped to [0, length()].
  Vec2 point_at(double s) const;
  /// Unit tangent of the segment containing arc length s.
  Vec2 direction_at(double s) const;

 private:
  std::vector<Vec2> pts_;
  std::vector<double> cum_;
};

struct Projection {
  double arclength = 0.0;
  double lateral = 0.0;  // signed; positive = right of the path direction
  int segment = 0;
  double t = 0.0;  // parameter within the segment, in [0, 1]
};

/// Closest point on the path. Ties break toward the smaller arc length.
Projection project_point(const Vec2& p, const Polyline& path);

/// Points spaced `resolution` apart by arc length along the input; the final
/// point is always retained even when the last gap is shorter.
Polyline resample_polyline(const Polyline& p, double resolution);

Polyline transform_polyline(const Polyline& p, const Pose& frame);

}  // namespace ptnet
