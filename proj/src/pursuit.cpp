#include "ptnet/pursuit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ptnet {

namespace {

// Discrete choice of the goal segment: which path segment the tracker aims at
// and which quadratic root within it. Everything here is value-level; the
// differentiable part re-derives the chosen root from tape variables.
struct GoalChoice {
  int segment = -1;
  double root_sign = 1.0;  // +1: far root, -1: near root
  double t = 0.0;          // value of the chosen root
};

std::optional<GoalChoice> choose_goal_segment(const Polyline& path, Vec2 p,
                                              double L, double* min_dist_out) {
  const auto& pts = path.points();
  const auto& cum = path.cumulative_arclength();
  const double s_proj = project_point(p, path).arclength;

  std::optional<GoalChoice> best;
  double best_arclength = -std::numeric_limits<double>::infinity();
  double min_dist = std::numeric_limits<double>::infinity();

  for (int k = 0; k + 1 < static_cast<int>(pts.size()); ++k) {
    const Vec2 d = pts[k + 1] - pts[k];
    const Vec2 m = pts[k] - p;
    const double a = d.squared_norm();
    const double bh = m.dot(d);
    const double c = m.squared_norm() - L * L;
    const double disc = bh * bh - a * c;
    {
      // Track the closest approach for the NoIntersection diagnostic.
      const double t_near = std::clamp(-bh / a, 0.0, 1.0);
      min_dist = std::min(min_dist, (pts[k] + d * t_near - p).norm());
    }
    if (disc < 0.0) continue;
    const double sq = std::sqrt(disc);
    const double seg_len = std::sqrt(a);
    for (double sign : {+1.0, -1.0}) {
      const double t = (-bh + sign * sq) / a;
      if (t < -1e-12 || t > 1.0 + 1e-12) continue;
      const double s = cum[k] + std::clamp(t, 0.0, 1.0) * seg_len;
      if (s <= s_proj) continue;  // only points ahead of the actor
      if (s > best_arclength) {
        best_arclength = s;
        best = GoalChoice{k, sign, t};
      }
    }
  }
  if (min_dist_out) *min_dist_out = min_dist;
  return best;
}

// Shared tracker arithmetic, instantiated for plain doubles and tape vars.
// Both instantiations execute the identical operation sequence, so the plain
// rollout and the recorded rollout agree bit for bit.
struct ScalarMath {
  using S = double;
  S constant(double c) const { return c; }
  S sin(S x) const { return std::sin(x); }
  S cos(S x) const { return std::cos(x); }
  S sqrt(S x) const { return std::sqrt(x); }
  S min_const(S x, double c) const { return std::min(x, c); }
  S max_const(S x, double c) const { return std::max(x, c); }
  double value(S x) const { return x; }
};

struct TapeMath {
  ad::Tape* tape;
  using S = ad::Var;
  S constant(double c) const { return tape->constant(c); }
  S sin(S x) const { return tape->sin(x); }
  S cos(S x) const { return tape->cos(x); }
  S sqrt(S x) const { return tape->sqrt(x); }
  S min_const(S x, double c) const { return tape->min_const(x, c); }
  S max_const(S x, double c) const { return tape->max_const(x, c); }
  double value(S x) const { return x.value(); }
};

template <class Math>
struct StepState {
  typename Math::S x, y, v, h;
};

template <class Math, class AccelAt>
void rollout_impl(Math math, const TrackingState& initial, const Polyline& path,
                  const AccelAt& accel_at, const PursuitConfig& cfg,
                  Trajectory* out_traj,
                  std::vector<StepState<Math>>* out_states) {
  using S = typename Math::S;
  const double L = cfg.lookahead;
  const double L2 = L * L;

  StepState<Math> s{math.constant(initial.position.x),
                    math.constant(initial.position.y),
                    math.constant(initial.speed),
                    math.constant(initial.heading)};

  std::vector<TrajectoryState> states;
  states.reserve(cfg.horizon);

  for (int t = 0; t < cfg.horizon; ++t) {
    const Vec2 p{math.value(s.x), math.value(s.y)};
    const auto choice = choose_goal_segment(path, p, L, nullptr);

    S sin_h = math.sin(s.h);
    S cos_h = math.cos(s.h);

    S kappa = math.constant(0.0);
    if (choice) {
      // Re-derive the chosen intersection from the live state so the tape
      // sees the full dependency of the goal point on position.
      const Vec2 A = path.points()[choice->segment];
      const Vec2 B = path.points()[choice->segment + 1];
      const Vec2 d = B - A;
      const double a_quad = d.squared_norm();
      S mx = math.constant(A.x) - s.x;
      S my = math.constant(A.y) - s.y;
      S bh = mx * d.x + my * d.y;
      S c_quad = mx * mx + my * my - L2;
      S disc = math.max_const(bh * bh - c_quad * a_quad, 1e-18);
      S root = (choice->root_sign * math.sqrt(disc) - bh) * (1.0 / a_quad);
      S gx = math.constant(A.x) + root * d.x;
      S gy = math.constant(A.y) + root * d.y;
      // Lateral offset of the goal in the current vehicle frame (x = right).
      S x_g = cos_h * (gx - s.x) + sin_h * (gy - s.y);
      kappa = math.max_const(
          math.min_const(x_g * (2.0 / L2), cfg.max_curvature),
          -cfg.max_curvature);
    }
    // else: lookahead circle lost the path; continue straight.

    S step = s.v * cfg.dt;
    S nx = s.x - sin_h * step;
    S ny = s.y + cos_h * step;
    S nv = math.max_const(s.v + accel_at(t) * cfg.dt, 0.0);
    // Positive curvature (goal to the right) turns the heading clockwise.
    S nh = s.h - step * kappa;

    s = StepState<Math>{nx, ny, nv, nh};
    states.push_back(TrajectoryState{{math.value(s.x), math.value(s.y)},
                                     normalize_heading(math.value(s.h)),
                                     math.value(s.v)});
    if (out_states) out_states->push_back(s);
  }
  if (out_traj) *out_traj = Trajectory(cfg.dt, std::move(states));
}

}  // namespace

Vec2 find_goal_point(const TrackingState& state, const Polyline& path,
                     double L) {
  double min_dist = 0.0;
  const auto choice = choose_goal_segment(path, state.position, L, &min_dist);
  if (!choice) throw NoIntersectionError(min_dist);
  const Vec2 A = path.points()[choice->segment];
  const Vec2 B = path.points()[choice->segment + 1];
  return A + (B - A) * choice->t;
}

double curvature_from_goal(const Vec2& goal_in_frame, double L, double Mc) {
  const double raw = 2.0 * goal_in_frame.x / (L * L);
  return std::clamp(raw, -Mc, Mc);
}

Trajectory rollout(const TrackingState& initial, const Polyline& path,
                   const AccelProfile& accel, const PursuitConfig& config) {
  config.validate();
  if (static_cast<int>(accel.values.size()) != config.horizon)
    throw ShapeError("acceleration profile length != horizon");
  Trajectory traj;
  rollout_impl(ScalarMath{}, initial, path,
               [&](int t) { return accel.values[static_cast<size_t>(t)]; },
               config, &traj, static_cast<std::vector<StepState<ScalarMath>>*>(nullptr));
  return traj;
}

TapeRollout rollout_on_tape(ad::Tape& tape, const TrackingState& initial,
                            const Polyline& path, std::span<const ad::Var> accel,
                            const PursuitConfig& config) {
  config.validate();
  if (static_cast<int>(accel.size()) != config.horizon)
    throw ShapeError("acceleration profile length != horizon");
  TapeRollout out;
  std::vector<StepState<TapeMath>> steps;
  rollout_impl(TapeMath{&tape}, initial, path,
               [&](int t) { return accel[static_cast<size_t>(t)]; }, config,
               &out.trajectory, &steps);
  out.x.reserve(steps.size());
  for (const auto& s : steps) {
    out.x.push_back(s.x);
    out.y.push_back(s.y);
    out.heading.push_back(s.h);
    out.speed.push_back(s.v);
  }
  return out;
}

Certificate rollout_feasibility_certificate(const Trajectory& t,
                                            const PursuitConfig& config) {
  constexpr double kStationary = 0.01;  // m, skip near-zero displacements
  constexpr double kTol = 1e-9;
  Certificate cert;
  cert.min_accel = std::numeric_limits<double>::infinity();
  cert.max_accel = -std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < t.size(); ++i) {
    const auto& a = t.states[static_cast<size_t>(i)];
    const auto& b = t.states[static_cast<size_t>(i) + 1];
    const double accel = (b.speed - a.speed) / t.dt;
    cert.min_accel = std::min(cert.min_accel, accel);
    cert.max_accel = std::max(cert.max_accel, accel);
    if (accel < -kAccelBound - kTol || accel > kAccelBound + kTol)
      throw CertificateError("traversal acceleration " + std::to_string(accel) +
                             " outside [-8, 8]");
    const double chord = (b.position - a.position).norm();
    if (chord < kStationary) continue;
    const double dh = normalize_heading(b.heading - a.heading);
    const double kappa = arc_curvature(dh, chord);
    cert.max_abs_curvature = std::max(cert.max_abs_curvature, kappa);
    ++cert.segments_checked;
    if (kappa > config.max_curvature + kTol)
      throw CertificateError("curvature " + std::to_string(kappa) +
                             " exceeds " + std::to_string(config.max_curvature));
  }
  if (!std::isfinite(cert.min_accel)) {
    cert.min_accel = 0.0;
    cert.max_accel = 0.0;
  }
  return cert;
}

}  // namespace ptnet
