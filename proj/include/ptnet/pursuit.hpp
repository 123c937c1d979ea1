#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ptnet/polyline.hpp"
#include "ptnet/tape.hpp"
#include "ptnet/types.hpp"

namespace ptnet {

struct PursuitConfig {
  double lookahead = 10.0;      // m, radius of the goal-point circle
  double max_curvature = 0.3;   // 1/m, hard clamp on commanded curvature
  double dt = 0.1;              // s
  int horizon = 60;             // steps

  void validate() const {
    if (lookahead <= 0.0 || max_curvature <= 0.0 || dt <= 0.0 || horizon < 1)
      throw Error("invalid pursuit config");
  }
};

// Acceleration commands are physically bounded; the predictor's scaled tanh
// keeps its outputs strictly inside this range.
inline constexpr double kAccelBound = 8.0;  // m/s^2

struct TrackingState {
  Vec2 position;        // rollout frame (actor frame at t = 0)
  double speed = 0.0;   // m/s, >= 0
  double heading = 0.0; // rollout frame, 0 faces +y

  TrackingState() = default;
  TrackingState(Vec2 p, double v, double h) : position(p), speed(v), heading(h) {
    if (speed < 0.0) throw Error("tracking speed must be >= 0");
  }
};

struct AccelProfile {
  std::vector<double> values;  // m/s^2, each within [-kAccelBound, kAccelBound]

  explicit AccelProfile(std::vector<double> v) : values(std::move(v)) {
    for (double a : values)
      if (!(a >= -kAccelBound && a <= kAccelBound))
        throw Error("acceleration outside [-8, 8] m/s^2");
  }
};

/// The lookahead-circle intersection with the largest arc length among those
/// ahead of the actor's projection. Throws NoIntersectionError (carrying the
/// closest approach) when the circle misses the path or nothing lies ahead.
Vec2 find_goal_point(const TrackingState& state, const Polyline& path, double L);

/// kappa = clamp(2 * x_g / L^2, -Mc, +Mc), x_g the lateral (x) component of
/// the goal point in the instantaneous vehicle frame. Positive = turn toward
/// +x (the right of the current heading).
double curvature_from_goal(const Vec2& goal_in_frame, double L, double Mc);

/// Integrates the tracker for config.horizon steps from `initial`, re-finding
/// the goal point in the current vehicle frame each step. Speed is clamped at
/// zero from below; if the lookahead circle loses contact with the path the
/// tracker continues straight (kappa = 0). States are the T future steps.
Trajectory rollout(const TrackingState& initial, const Polyline& path,
                   const AccelProfile& accel, const PursuitConfig& config);

/// Same integration recorded on a tape so gradients flow from any scalar
/// function of the outputs back to the acceleration inputs. Produces values
/// bit-identical to rollout() by construction (one shared implementation).
struct TapeRollout {
  std::vector<ad::Var> x, y, heading, speed;  // per step
  Trajectory trajectory;                      // same values, as plain doubles
};
TapeRollout rollout_on_tape(ad::Tape& tape, const TrackingState& initial,
                            const Polyline& path, std::span<const ad::Var> accel,
                            const PursuitConfig& config);

/// Re-derives per-segment curvature and per-step traversal acceleration from
/// a trajectory and verifies both bounds, throwing CertificateError on any
/// violation. Returns the observed extremes.
struct Certificate {
  double max_abs_curvature = 0.0;
  double min_accel = 0.0;
  double max_accel = 0.0;
  int segments_checked = 0;
};
Certificate rollout_feasibility_certificate(const Trajectory& t,
                                            const PursuitConfig& config);

/// Curvature of the circular arc through two waypoints given the heading
/// change between them (exact for arcs; used by the certificate and metrics).
inline double arc_curvature(double heading_change, double chord) {
  return 2.0 * std::sin(std::abs(heading_change) * 0.5) / chord;
}

}  // namespace ptnet
