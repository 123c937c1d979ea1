#pragma once

#include <span>
#include <vector>

#include "ptnet/polyline.hpp"
#include "ptnet/types.hpp"

namespace ptnet {

struct MetricConfig {
  double max_curvature = 0.3;          // 1/m
  double max_lateral_speed = 1.0;      // m/s
  double max_centripetal_accel = 10.0; // m/s^2
  double min_traversal_accel = -12.0;  // m/s^2
  double max_traversal_accel = 8.0;    // m/s^2
  double stationary_eps = 0.01;        // m, skip curvature below this step
  double speed_eps = 0.01;             // m/s, motion heading undefined below
};

/// A trajectory to audit. has_heading = false means the source had no
/// bounding-box heading; motion heading substitutes and reports flag it.
struct MetricInput {
  Trajectory trajectory;
  bool has_heading = true;
};

/// Arc curvature per consecutive waypoint pair, from the bounding-box heading
/// change and the positional displacement. Near-stationary segments
/// (displacement < stationary_eps) are skipped.
std::vector<double> segment_curvature(const MetricInput& input,
                                      const MetricConfig& cfg);

struct SpeedDecomp {
  double longitudinal = 0.0;  // along the bounding-box heading
  double lateral = 0.0;       // orthogonal, positive right
};

/// Finite-difference velocity (p_{t+1} - p_t)/dt decomposed onto the
/// bounding-box heading at t.
std::vector<SpeedDecomp> lateral_longitudinal_speed(const MetricInput& input);

struct AccelDecomp {
  double traversal = 0.0;    // rate of change of speed along the motion
  double centripetal = 0.0;  // magnitude orthogonal to the motion heading
  bool centripetal_valid = true;
};

/// Finite-difference acceleration decomposed relative to the motion heading.
/// Traversal is the speed rate (|v_{t+1}| - |v_t|)/dt; centripetal is the
/// normal component of (v_{t+1} - v_t)/dt, skipped when the speed at t is
/// below speed_eps (motion heading undefined).
std::vector<AccelDecomp> traversal_centripetal_accel(const MetricInput& input,
                                                     const MetricConfig& cfg);

struct TrajectoryFlags {
  bool curvature = false;
  bool lateral_speed = false;
  bool centripetal = false;
  bool min_traversal = false;
  bool max_traversal = false;
  bool used_motion_heading = false;
};

struct FeasibilityReport {
  std::vector<TrajectoryFlags> per_trajectory;
  double frac_curvature = 0.0;
  double frac_lateral_speed = 0.0;
  double frac_centripetal = 0.0;
  double frac_min_traversal = 0.0;
  double frac_max_traversal = 0.0;
  int count = 0;

  bool all_zero() const {
    return frac_curvature == 0.0 && frac_lateral_speed == 0.0 &&
           frac_centripetal == 0.0 && frac_min_traversal == 0.0 &&
           frac_max_traversal == 0.0;
  }
};

/// One violation flag per metric per trajectory (any offending step marks the
/// whole trajectory), aggregated to fractions of the input set.
FeasibilityReport feasibility_report(std::span<const MetricInput> trajectories,
                                     const MetricConfig& cfg);

struct ErrorMetrics {
  double avg_de = 0.0;
  double avg_ate = 0.0;
  double avg_cte = 0.0;
  bool degenerate_ground_truth = false;
};

/// Average displacement error plus along-track / cross-track decomposition in
/// the path-relative frame of the ground truth, resampled at `resolution`.
/// A ground truth with total motion below `resolution` degenerates to
/// ATE = DE, CTE = 0 (flagged).
ErrorMetrics error_metrics(const Trajectory& predicted,
                           const Trajectory& ground_truth,
                           double resolution = 0.1);

}  // namespace ptnet
