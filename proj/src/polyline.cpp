#include "ptnet/polyline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ptnet {

Polyline::Polyline(std::vector<Vec2> points) {
  pts_.reserve(points.size());
  for (const Vec2& p : points) {
    if (!pts_.empty() && (p - pts_.back()).norm() <= kMinSegment) continue;
    pts_.push_back(p);
  }
  if (pts_.size() < 2)
    throw DegeneratePathError("polyline needs >= 2 distinct points");
  cum_.resize(pts_.size());
  cum_[0] = 0.0;
  for (size_t i = 1; i < pts_.size(); ++i)
    cum_[i] = cum_[i - 1] + (pts_[i] - pts_[i - 1]).norm();
}

Vec2 Polyline::point_at(double s) const {
  if (s <= 0.0) return pts_.front();
  if (s >= length()) return pts_.back();
  auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
  size_t k = static_cast<size_t>(it - cum_.begin()) - 1;
  const double seg_len = cum_[k + 1] - cum_[k];
  const double t = (s - cum_[k]) / seg_len;
  return pts_[k] + (pts_[k + 1] - pts_[k]) * t;
}

Vec2 Polyline::direction_at(double s) const {
  auto it = std::upper_bound(cum_.begin(), cum_.end(), std::max(s, 0.0));
  size_t k = (it == cum_.begin()) ? 0 : static_cast<size_t>(it - cum_.begin()) - 1;
  if (k + 1 >= pts_.size()) k = pts_.size() - 2;
  const Vec2 d = pts_[k + 1] - pts_[k];
  return d * (1.0 / d.norm());
}

Projection project_point(const Vec2& p, const Polyline& path) {
  const auto& pts = path.points();
  const auto& cum = path.cumulative_arclength();
  Projection best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int k = 0; k + 1 < static_cast<int>(pts.size()); ++k) {
    const Vec2 d = pts[k + 1] - pts[k];
    const double len2 = d.squared_norm();
    double t = (p - pts[k]).dot(d) / len2;
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 foot = pts[k] + d * t;
    const double dist = (p - foot).norm();
    // Strict < keeps the first (smallest arc length) winner on ties.
    if (dist < best_dist) {
      best_dist = dist;
      best.segment = k;
      best.t = t;
      best.arclength = cum[k] + t * std::sqrt(len2);
      const Vec2 dir = d * (1.0 / std::sqrt(len2));
      const Vec2 right{dir.y, -dir.x};
      best.lateral = right.dot(p - foot);
    }
  }
  return best;
}

Polyline resample_polyline(const Polyline& p, double resolution) {
  if (resolution <= 0.0) throw NumericError("resample resolution must be > 0");
  std::vector<Vec2> out;
  const double total = p.length();
  for (long k = 0; static_cast<double>(k) * resolution < total; ++k)
    out.push_back(p.point_at(static_cast<double>(k) * resolution));
  out.push_back(p.points().back());
  if (out.size() < 2) out = {p.points().front(), p.points().back()};
  return Polyline(std::move(out));
}

Polyline transform_polyline(const Polyline& p, const Pose& frame) {
  std::vector<Vec2> out;
  out.reserve(p.points().size());
  for (const Vec2& q : p.points()) out.push_back(transform_to_frame(q, frame));
  return Polyline(std::move(out));
}

}  // namespace ptnet
