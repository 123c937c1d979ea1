#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptnet {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegeneratePathError : Error {
  using Error::Error;
};

struct ShapeError : Error {
  using Error::Error;
};

struct NumericError : Error {
  using Error::Error;
};

// Thrown when the lookahead circle misses the reference path; carries the
// closest approach so the caller can see how badly the precondition failed.
struct NoIntersectionError : Error {
  explicit NoIntersectionError(double min_distance)
      : Error("lookahead circle does not intersect the path (closest approach " +
              std::to_string(min_distance) + " m)"),
        min_distance(min_distance) {}
  double min_distance;
};

struct CertificateError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& what, long line)
      : Error(what + " (line " + std::to_string(line) + ")"), line(line) {}
  long line;
};

/// Maps any angle to its representative in [-pi, pi).
inline double normalize_heading(double h) {
  double r = std::remainder(h, 2.0 * M_PI);
  if (r >= M_PI) r -= 2.0 * M_PI;
  if (r < -M_PI) r += 2.0 * M_PI;
  return r;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_in, double y_in) : x(x_in), y(y_in) {
    if (!std::isfinite(x) || !std::isfinite(y))
      throw NumericError("Vec2 components must be finite");
  }

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  // z-component of the 3D cross product; positive when o is counterclockwise.
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Heading convention: 0 faces +y, positive angles rotate counterclockwise.
// heading_dir is the forward unit vector, right_dir points to the right of
// forward; (right_dir, heading_dir) is a proper rotation of the (x, y) axes.
inline Vec2 heading_dir(double h) { return {-std::sin(h), std::cos(h)}; }
inline Vec2 right_dir(double h) { return {std::cos(h), std::sin(h)}; }

struct Pose {
  Vec2 position;
  double heading = 0.0;  // normalized to [-pi, pi)

  Pose() = default;
  Pose(Vec2 p, double h) : position(p), heading(normalize_heading(h)) {}
};

/// Expresses p in the frame anchored at `frame`: the frame position becomes
/// the origin, forward becomes +y, and +x points to the right of forward.
inline Vec2 transform_to_frame(const Vec2& p, const Pose& frame) {
  const Vec2 d = p - frame.position;
  return {right_dir(frame.heading).dot(d), heading_dir(frame.heading).dot(d)};
}

/// Inverse of transform_to_frame.
inline Vec2 transform_from_frame(const Vec2& p, const Pose& frame) {
  return frame.position + right_dir(frame.heading) * p.x +
         heading_dir(frame.heading) * p.y;
}

inline double heading_to_frame(double world_heading, const Pose& frame) {
  return normalize_heading(world_heading - frame.heading);
}

inline double heading_from_frame(double local_heading, const Pose& frame) {
  return normalize_heading(local_heading + frame.heading);
}

// Number of past positions kept per tracked actor (1 s at 0.1 s resolution).
inline constexpr int kHistoryLen = 10;

struct ActorState {
  Pose pose;
  double speed = 0.0;         // m/s, >= 0
  double acceleration = 0.0;  // m/s^2
  std::vector<Vec2> history;  // past positions, oldest first, size kHistoryLen

  ActorState() = default;
  ActorState(Pose p, double v, double a, std::vector<Vec2> hist)
      : pose(p), speed(v), acceleration(a), history(std::move(hist)) {
    if (speed < 0.0) throw NumericError("actor speed must be >= 0");
    pad_history();
  }

  // Shorter histories are padded by repeating the oldest observation.
  void pad_history() {
    if (history.empty()) history.push_back(pose.position);
    while (static_cast<int>(history.size()) < kHistoryLen)
      history.insert(history.begin(), history.front());
    if (static_cast<int>(history.size()) > kHistoryLen)
      history.erase(history.begin(),
                    history.end() - static_cast<long>(kHistoryLen));
  }
};

struct TrajectoryState {
  Vec2 position;
  double heading = 0.0;
  double speed = 0.0;
};

struct Trajectory {
  double dt = 0.1;
  std::vector<TrajectoryState> states;

  Trajectory() = default;
  Trajectory(double dt_in, std::vector<TrajectoryState> s)
      : dt(dt_in), states(std::move(s)) {
    if (dt <= 0.0) throw NumericError("trajectory dt must be > 0");
    if (states.empty()) throw ShapeError("trajectory must have >= 1 state");
  }

  int size() const { return static_cast<int>(states.size()); }
};

}  // namespace ptnet
