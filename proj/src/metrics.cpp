#include "ptnet/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ptnet/pursuit.hpp"

namespace ptnet {

namespace {

// Headings per waypoint: stored bounding-box headings, or motion headings
// (direction to the next waypoint, last one repeated) when the source has
// none.
std::vector<double> effective_headings(const MetricInput& input) {
  const auto& st = input.trajectory.states;
  std::vector<double> h(st.size());
  if (input.has_heading) {
    for (size_t i = 0; i < st.size(); ++i) h[i] = st[i].heading;
    return h;
  }
  for (size_t i = 0; i + 1 < st.size(); ++i) {
    const Vec2 d = st[i + 1].position - st[i].position;
    h[i] = (d.norm() > 1e-12) ? std::atan2(-d.x, d.y)
                              : (i > 0 ? h[i - 1] : 0.0);
  }
  if (st.size() > 1) h.back() = h[st.size() - 2];
  return h;
}

}  // namespace

std::vector<double> segment_curvature(const MetricInput& input,
                                      const MetricConfig& cfg) {
  const auto& st = input.trajectory.states;
  if (st.size() < 2) return {};
  const std::vector<double> h = effective_headings(input);
  std::vector<double> out;
  out.reserve(st.size() - 1);
  for (size_t i = 0; i + 1 < st.size(); ++i) {
    const double chord = (st[i + 1].position - st[i].position).norm();
    if (chord < cfg.stationary_eps) continue;
    const double dh = normalize_heading(h[i + 1] - h[i]);
    out.push_back(arc_curvature(dh, chord));
  }
  return out;
}

std::vector<SpeedDecomp> lateral_longitudinal_speed(const MetricInput& input) {
  const auto& st = input.trajectory.states;
  if (st.size() < 2) return {};
  const std::vector<double> h = effective_headings(input);
  const double dt = input.trajectory.dt;
  std::vector<SpeedDecomp> out;
  out.reserve(st.size() - 1);
  for (size_t i = 0; i + 1 < st.size(); ++i) {
    const Vec2 v = (st[i + 1].position - st[i].position) * (1.0 / dt);
    out.push_back(SpeedDecomp{heading_dir(h[i]).dot(v), right_dir(h[i]).dot(v)});
  }
  return out;
}

std::vector<AccelDecomp> traversal_centripetal_accel(const MetricInput& input,
                                                     const MetricConfig& cfg) {
  const auto& st = input.trajectory.states;
  if (st.size() < 3) return {};
  const double dt = input.trajectory.dt;
  std::vector<AccelDecomp> out;
  out.reserve(st.size() - 2);
  for (size_t i = 0; i + 2 < st.size(); ++i) {
    const Vec2 v0 = (st[i + 1].position - st[i].position) * (1.0 / dt);
    const Vec2 v1 = (st[i + 2].position - st[i + 1].position) * (1.0 / dt);
    AccelDecomp d;
    d.traversal = (v1.norm() - v0.norm()) / dt;
    const double speed0 = v0.norm();
    if (speed0 < cfg.speed_eps) {
      d.centripetal = 0.0;
      d.centripetal_valid = false;
    } else {
      const Vec2 accel = (v1 - v0) * (1.0 / dt);
      const Vec2 motion_dir = v0 * (1.0 / speed0);
      const Vec2 normal{-motion_dir.y, motion_dir.x};
      d.centripetal = std::abs(normal.dot(accel));
    }
    out.push_back(d);
  }
  return out;
}

FeasibilityReport feasibility_report(std::span<const MetricInput> trajectories,
                                     const MetricConfig& cfg) {
  FeasibilityReport report;
  report.count = static_cast<int>(trajectories.size());
  int c = 0, l = 0, cp = 0, mn = 0, mx = 0;
  for (const MetricInput& input : trajectories) {
    TrajectoryFlags flags;
    flags.used_motion_heading = !input.has_heading;
    for (double k : segment_curvature(input, cfg))
      if (k > cfg.max_curvature) flags.curvature = true;
    for (const SpeedDecomp& s : lateral_longitudinal_speed(input))
      if (std::abs(s.lateral) > cfg.max_lateral_speed)
        flags.lateral_speed = true;
    for (const AccelDecomp& a : traversal_centripetal_accel(input, cfg)) {
      if (a.centripetal_valid && a.centripetal > cfg.max_centripetal_accel)
        flags.centripetal = true;
      if (a.traversal < cfg.min_traversal_accel) flags.min_traversal = true;
      if (a.traversal > cfg.max_traversal_accel) flags.max_traversal = true;
    }
    c += flags.curvature;
    l += flags.lateral_speed;
    cp += flags.centripetal;
    mn += flags.min_traversal;
    mx += flags.max_traversal;
    report.per_trajectory.push_back(flags);
  }
  if (report.count > 0) {
    const double n = report.count;
    report.frac_curvature = c / n;
    report.frac_lateral_speed = l / n;
    report.frac_centripetal = cp / n;
    report.frac_min_traversal = mn / n;
    report.frac_max_traversal = mx / n;
  }
  return report;
}

ErrorMetrics error_metrics(const Trajectory& predicted,
                           const Trajectory& ground_truth, double resolution) {
  if (predicted.size() != ground_truth.size())
    throw ShapeError("trajectory lengths differ");
  if (predicted.dt != ground_truth.dt)
    throw ShapeError("trajectory timesteps differ");

  ErrorMetrics em;
  const int T = predicted.size();
  double sum_de = 0.0;
  for (int t = 0; t < T; ++t)
    sum_de += (predicted.states[static_cast<size_t>(t)].position -
               ground_truth.states[static_cast<size_t>(t)].position)
                  .norm();
  em.avg_de = sum_de / T;

  // Total motion below one resolution step: no usable path direction.
  double motion = 0.0;
  for (int t = 0; t + 1 < T; ++t)
    motion += (ground_truth.states[static_cast<size_t>(t) + 1].position -
               ground_truth.states[static_cast<size_t>(t)].position)
                  .norm();
  if (motion < resolution) {
    em.degenerate_ground_truth = true;
    em.avg_ate = em.avg_de;
    em.avg_cte = 0.0;
    return em;
  }

  std::vector<Vec2> gt_points;
  gt_points.reserve(static_cast<size_t>(T));
  for (const TrajectoryState& s : ground_truth.states)
    gt_points.push_back(s.position);
  const Polyline gt_path = resample_polyline(Polyline(std::move(gt_points)),
                                             resolution);

  double sum_ate = 0.0, sum_cte = 0.0;
  for (int t = 0; t < T; ++t) {
    const Projection pp =
        project_point(predicted.states[static_cast<size_t>(t)].position, gt_path);
    const Projection pg = project_point(
        ground_truth.states[static_cast<size_t>(t)].position, gt_path);
    sum_ate += std::abs(pp.arclength - pg.arclength);
    sum_cte += std::abs(pp.lateral);
  }
  em.avg_ate = sum_ate / T;
  em.avg_cte = sum_cte / T;
  return em;
}

}  // namespace ptnet
