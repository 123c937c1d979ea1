#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "ptnet/polyline.hpp"
#include "ptnet/types.hpp"

namespace ptnet::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u =
      static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
  return lo + (hi - lo) * u;
}

/// Central finite difference of f at x.
inline double central_diff(const std::function<double(double)>& f, double x,
                           double step) {
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

/// Relative error with an absolute floor for near-zero values.
inline double rel_err(double got, double want) {
  const double scale = std::max({std::abs(got), std::abs(want), 1e-8});
  return std::abs(got - want) / scale;
}

/// Smooth random polyline: a heading random walk with bounded curvature.
/// Suitable as lane centerlines and tracking references.
inline Polyline random_smooth_polyline(std::mt19937_64& rng, int n_points = 60,
                                       double step = 2.0,
                                       double max_turn = 0.15) {
  std::vector<Vec2> pts;
  Vec2 p{uniform(rng, -10.0, 10.0), uniform(rng, -10.0, 10.0)};
  double heading = uniform(rng, -M_PI, M_PI);
  pts.push_back(p);
  for (int i = 1; i < n_points; ++i) {
    heading += uniform(rng, -max_turn, max_turn);
    p = p + heading_dir(heading) * step;
    pts.push_back(p);
  }
  return Polyline(std::move(pts));
}

/// Brute-force nearest point on a polyline by dense sampling.
struct BruteProjection {
  double arclength;
  double distance;
};

inline BruteProjection brute_force_project(const Vec2& p, const Polyline& path,
                                           int samples = 10000) {
  BruteProjection best{0.0, std::numeric_limits<double>::infinity()};
  for (int i = 0; i <= samples; ++i) {
    const double s = path.length() * i / samples;
    const double d = (path.point_at(s) - p).norm();
    if (d < best.distance) best = BruteProjection{s, d};
  }
  return best;
}

}  // namespace ptnet::testing
