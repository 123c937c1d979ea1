#include "ptnet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "ptnet/metrics.hpp"
#include "ptnet/pursuit.hpp"

namespace ptnet {

using json = nlohmann::json;

MapKind map_kind_from_string(const std::string& s) {
  if (s == "straight") return MapKind::Straight;
  if (s == "curve") return MapKind::Curve;
  if (s == "fork") return MapKind::Fork;
  if (s == "merge") return MapKind::Merge;
  if (s == "grid") return MapKind::Grid;
  throw Error("unknown map kind: " + s);
}

std::string to_string(MapKind k) {
  switch (k) {
    case MapKind::Straight: return "straight";
    case MapKind::Curve: return "curve";
    case MapKind::Fork: return "fork";
    case MapKind::Merge: return "merge";
    case MapKind::Grid: return "grid";
  }
  return "?";
}

namespace {

// 53-bit uniform in [0, 1); identical output on every platform.
double uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform(rng);
}

double gaussian(std::mt19937_64& rng, double stddev) {
  // Box-Muller; deterministic and platform-stable.
  const double u1 = std::max(uniform(rng), 1e-300);
  const double u2 = uniform(rng);
  return stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::vector<Vec2> straight_points(Vec2 start, double heading, double length,
                                  double spacing = 5.0) {
  std::vector<Vec2> pts;
  const Vec2 dir = heading_dir(heading);
  const int n = std::max(2, static_cast<int>(std::ceil(length / spacing)) + 1);
  for (int i = 0; i < n; ++i)
    pts.push_back(start + dir * (length * i / (n - 1)));
  return pts;
}

// Arc from `start` with initial heading, turning `sweep` radians (positive =
// left turn in this frame) at the given radius.
std::vector<Vec2> arc_points(Vec2 start, double heading, double radius,
                             double sweep, double spacing = 2.0) {
  const double arc_len = std::abs(sweep) * radius;
  const int n = std::max(3, static_cast<int>(std::ceil(arc_len / spacing)) + 1);
  std::vector<Vec2> pts;
  pts.reserve(n);
  // Center sits at distance `radius` orthogonal to the heading: to the left
  // for a left (positive) turn, to the right otherwise.
  const double side = sweep >= 0.0 ? -1.0 : 1.0;
  const Vec2 center = start + right_dir(heading) * (side * radius);
  const Vec2 r0 = start - center;
  for (int i = 0; i < n; ++i) {
    const double a = sweep * i / (n - 1);
    // Rotate r0 by a (counterclockwise).
    const Vec2 r{r0.x * std::cos(a) - r0.y * std::sin(a),
                 r0.x * std::sin(a) + r0.y * std::cos(a)};
    pts.push_back(center + r);
  }
  return pts;
}

double lane_end_heading(const Polyline& cl) {
  const Vec2 d = cl.direction_at(cl.length());
  return std::atan2(-d.x, d.y);
}

void maybe_add_sign(std::mt19937_64& rng, Lane& lane) {
  if (uniform(rng) > 0.4) return;
  const double s = uniform(rng, 0.3, 0.9) * lane.centerline.length();
  const Vec2 p = lane.centerline.point_at(s);
  const Vec2 dir = lane.centerline.direction_at(s);
  const Vec2 right{dir.y, -dir.x};
  const SignKind kind = uniform(rng) < 0.5 ? SignKind::Stop : SignKind::SpeedLimit;
  lane.signs.push_back(Sign{p + right * 3.0, kind});
}

}  // namespace

LaneGraph generate_map(std::uint64_t seed, MapKind kind) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  const Vec2 origin{uniform(rng, -20.0, 20.0), uniform(rng, -20.0, 20.0)};
  const double base_heading = uniform(rng, -M_PI, M_PI);
  const double limit = uniform(rng, 5.0, 20.0);

  std::vector<Lane> lanes;
  std::vector<std::pair<int, int>> edges;

  switch (kind) {
    case MapKind::Straight: {
      const double len = uniform(rng, 50.0, 150.0);
      lanes.emplace_back(0, Polyline(straight_points(origin, base_heading, len)),
                         limit);
      break;
    }
    case MapKind::Curve: {
      const double radius = uniform(rng, 15.0, 100.0);
      const double len = uniform(rng, 50.0, 150.0);
      const double sweep = std::min(len / radius, 1.5 * M_PI) *
                           (uniform(rng) < 0.5 ? 1.0 : -1.0);
      lanes.emplace_back(
          0, Polyline(arc_points(origin, base_heading, radius, sweep)), limit);
      break;
    }
    case MapKind::Fork: {
      const double stem_len = uniform(rng, 50.0, 100.0);
      Polyline stem(straight_points(origin, base_heading, stem_len));
      const Vec2 tip = stem.points().back();
      const double fork_angle = uniform(rng, 15.0, 45.0) * M_PI / 180.0;
      const double branch_len = uniform(rng, 50.0, 120.0);
      const double radius = std::clamp(uniform(rng, 30.0, 100.0), 15.0, 100.0);
      lanes.emplace_back(0, std::move(stem), limit);
      lanes.emplace_back(
          1, Polyline(straight_points(tip, base_heading, branch_len)), limit);
      std::vector<Vec2> turn =
          arc_points(tip, base_heading, radius, fork_angle);
      const double turn_end = lane_end_heading(Polyline(turn));
      std::vector<Vec2> tail =
          straight_points(turn.back(), turn_end, branch_len * 0.6);
      turn.insert(turn.end(), tail.begin() + 1, tail.end());
      lanes.emplace_back(2, Polyline(std::move(turn)), limit);
      edges.push_back({0, 1});
      edges.push_back({0, 2});
      break;
    }
    case MapKind::Merge: {
      const double out_len = uniform(rng, 60.0, 120.0);
      const double in_len = uniform(rng, 50.0, 100.0);
      Polyline out_lane(straight_points(origin, base_heading, out_len));
      const Vec2 junction = origin;
      // Lane 0 runs straight into the junction along base_heading.
      const Vec2 in_start =
          junction - heading_dir(base_heading) * in_len;
      lanes.emplace_back(0, Polyline(straight_points(in_start, base_heading,
                                                     in_len)),
                         limit);
      // Lane 1 curves into the junction from an angled approach.
      const double merge_angle = uniform(rng, 15.0, 45.0) * M_PI / 180.0;
      const double approach_heading = base_heading + merge_angle;
      std::vector<Vec2> approach = arc_points(
          junction + heading_dir(approach_heading + M_PI) * in_len,
          approach_heading, std::clamp(in_len / merge_angle, 15.0, 100.0),
          -merge_angle);
      // Force the approach to land exactly on the junction.
      const Vec2 gap = junction - approach.back();
      for (Vec2& p : approach) p = p + gap;
      lanes.emplace_back(1, Polyline(std::move(approach)), limit);
      lanes.emplace_back(2, std::move(out_lane), limit);
      edges.push_back({0, 2});
      edges.push_back({1, 2});
      break;
    }
    case MapKind::Grid: {
      // A small junction patch: an approach lane that forks into a straight
      // crossing and a turn, plus an unconnected cross street for clutter.
      const double leg = uniform(rng, 50.0, 90.0);
      Polyline approach(straight_points(origin, base_heading, leg));
      const Vec2 center = approach.points().back();
      lanes.emplace_back(0, std::move(approach), limit);
      lanes.emplace_back(
          1, Polyline(straight_points(center, base_heading, leg)), limit);
      const double turn_dir = uniform(rng) < 0.5 ? 1.0 : -1.0;
      const double radius = uniform(rng, 15.0, 40.0);
      std::vector<Vec2> turn =
          arc_points(center, base_heading, radius, turn_dir * M_PI / 2.0);
      const double turn_end = lane_end_heading(Polyline(turn));
      std::vector<Vec2> tail = straight_points(turn.back(), turn_end, leg * 0.7);
      turn.insert(turn.end(), tail.begin() + 1, tail.end());
      lanes.emplace_back(2, Polyline(std::move(turn)), limit);
      const Vec2 cross_start =
          center + right_dir(base_heading) * 12.0 -
          heading_dir(base_heading + M_PI / 2.0) * (leg * 0.5);
      lanes.emplace_back(
          3,
          Polyline(straight_points(cross_start, base_heading + M_PI / 2.0, leg)),
          limit);
      edges.push_back({0, 1});
      edges.push_back({0, 2});
      break;
    }
  }
  for (Lane& l : lanes) maybe_add_sign(rng, l);
  return LaneGraph(std::move(lanes), std::move(edges));
}

namespace {

// Maximum |curvature| along a polyline between two arc lengths, sampled at
// the polyline's own vertices.
double max_curvature_between(const Polyline& path, double s0, double s1) {
  const auto& pts = path.points();
  const auto& cum = path.cumulative_arclength();
  double max_k = 0.0;
  for (size_t i = 1; i + 1 < pts.size(); ++i) {
    if (cum[i] < s0 || cum[i] > s1) continue;
    const Vec2 d0 = pts[i] - pts[i - 1];
    const Vec2 d1 = pts[i + 1] - pts[i];
    const double turn = std::atan2(d0.cross(d1), d0.dot(d1));
    const double step = 0.5 * (d0.norm() + d1.norm());
    if (step > 1e-9) max_k = std::max(max_k, std::abs(turn) / step);
  }
  return max_k;
}

// Random route through the lane graph starting at `lane_id`.
std::vector<int> random_route(const LaneGraph& map, int lane_id,
                              std::mt19937_64& rng, double min_length) {
  std::vector<int> route{lane_id};
  double length = map.lane(lane_id).centerline.length();
  while (length < min_length) {
    const auto& next = map.successors(route.back());
    std::vector<int> fresh;
    for (int s : next)
      if (std::find(route.begin(), route.end(), s) == route.end())
        fresh.push_back(s);
    if (fresh.empty()) break;
    const int pick = fresh[static_cast<size_t>(uniform(rng) * fresh.size()) %
                           fresh.size()];
    route.push_back(pick);
    length += map.lane(pick).centerline.length();
  }
  return route;
}

Polyline route_polyline(const LaneGraph& map, const std::vector<int>& route) {
  std::vector<Vec2> pts;
  for (int id : route) {
    const auto& cl = map.lane(id).centerline.points();
    size_t start = (!pts.empty() && (cl.front() - pts.back()).norm() < 1e-6)
                       ? 1
                       : 0;
    pts.insert(pts.end(), cl.begin() + start, cl.end());
  }
  return Polyline(std::move(pts));
}

// Piecewise-linear acceleration profile at 1 Hz knots tracking a target
// speed. Bounds +-4 m/s^2, per-knot change <= 3.5 (jerk <= 4 m/s^3 after
// interpolation), anchored at the actor's current acceleration.
AccelProfile oracle_profile(double v0, double a0, double v_target,
                            const PursuitConfig& cfg) {
  const double knot_dt = 1.0;
  const int n_knots =
      static_cast<int>(std::ceil(cfg.horizon * cfg.dt / knot_dt)) + 1;
  std::vector<double> knots(static_cast<size_t>(n_knots));
  knots[0] = std::clamp(a0, -4.0, 4.0);
  double v = v0;
  for (int k = 1; k < n_knots; ++k) {
    const double desired = std::clamp(0.8 * (v_target - v), -4.0, 4.0);
    const double step = std::clamp(desired - knots[k - 1], -3.5, 3.5);
    knots[k] = std::clamp(knots[k - 1] + step, -4.0, 4.0);
    v = std::max(0.0, v + knots[k] * knot_dt);
  }
  std::vector<double> values(static_cast<size_t>(cfg.horizon));
  for (int t = 0; t < cfg.horizon; ++t) {
    const double time = t * cfg.dt;
    const int k = std::min(n_knots - 2, static_cast<int>(time / knot_dt));
    const double frac = (time - k * knot_dt) / knot_dt;
    values[static_cast<size_t>(t)] =
        knots[static_cast<size_t>(k)] * (1.0 - frac) +
        knots[static_cast<size_t>(k) + 1] * frac;
  }
  return AccelProfile(std::move(values));
}

// History positions by tracking the reversed route backwards in time.
std::vector<Vec2> backfill_history(const Pose& pose, double speed,
                                   const Polyline& route, double s0) {
  std::vector<Vec2> reversed_pts(route.points().rbegin(),
                                 route.points().rend());
  std::vector<Vec2> history;
  try {
    Polyline back_path(std::move(reversed_pts));
    PursuitConfig cfg;
    cfg.horizon = kHistoryLen;
    const TrackingState state{pose.position, speed,
                              normalize_heading(pose.heading + M_PI)};
    AccelProfile zero(std::vector<double>(kHistoryLen, 0.0));
    (void)s0;
    const Trajectory back = rollout(state, back_path, zero, cfg);
    for (const TrajectoryState& s : back.states) history.push_back(s.position);
  } catch (const Error&) {
    // Degenerate reversed geometry: fall back to a straight history.
    for (int k = 1; k <= kHistoryLen; ++k)
      history.push_back(pose.position -
                        heading_dir(pose.heading) * (speed * 0.1 * k));
  }
  std::reverse(history.begin(), history.end());  // oldest first
  return history;
}

}  // namespace

std::vector<std::pair<ActorState, Trajectory>> generate_actors(
    const LaneGraph& map, std::uint64_t seed, int n, GenWarnings* warnings) {
  if (n < 1) throw Error("need >= 1 actor");
  if (map.empty()) throw Error("cannot place actors on an empty map");
  std::vector<std::pair<ActorState, Trajectory>> out;
  const MetricConfig metric_cfg;
  const PursuitConfig pursuit_cfg;

  for (int i = 0; i < n; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 20 && !placed; ++attempt) {
      std::mt19937_64 rng(seed ^ (0x6a09e667f3bcc909ull + 1000003ull * i +
                                  7919ull * attempt));
      const auto& lanes = map.lanes();
      const Lane& lane =
          lanes[static_cast<size_t>(uniform(rng) * lanes.size()) % lanes.size()];
      const std::vector<int> route =
          random_route(map, lane.id, rng, 150.0);
      const Polyline route_path = route_polyline(map, route);

      const double s0 =
          uniform(rng, 0.0, 0.6) * lane.centerline.length();
      const Vec2 on_lane = route_path.point_at(s0);
      const Vec2 dir = route_path.direction_at(s0);
      const Vec2 right{dir.y, -dir.x};
      const Vec2 position = on_lane + right * uniform(rng, -1.0, 1.0);
      const double lane_heading = std::atan2(-dir.x, dir.y);
      const double heading =
          normalize_heading(lane_heading + uniform(rng, -0.1, 0.1));

      // Speed capped so centripetal acceleration stays well under its bound
      // on the curviest stretch ahead.
      double v0 = uniform(rng, 1.0, 0.9 * lane.speed_limit);
      const double k_ahead = std::max(
          1e-4, max_curvature_between(route_path, s0, s0 + v0 * 6.0 + 40.0));
      const double v_cap = std::sqrt(7.0 / k_ahead);
      v0 = std::min(v0, v_cap);

      const double a0 = std::clamp(gaussian(rng, 1.0), -3.0, 3.0);
      double v_target = v0 + a0 * 2.0 + gaussian(rng, 0.5);
      v_target = std::clamp(v_target, 0.5, 0.95 * lane.speed_limit);
      v_target = std::min(v_target, v_cap);

      const AccelProfile profile =
          oracle_profile(v0, a0, v_target, pursuit_cfg);

      const Pose pose{position, heading};
      const TrackingState initial{position, v0, heading};
      // Trim the route so tracking starts just behind the actor.
      const Projection pr = project_point(position, route_path);
      std::vector<Vec2> trimmed{route_path.point_at(
          std::max(0.0, pr.arclength - 5.0))};
      const auto& cum = route_path.cumulative_arclength();
      for (size_t k = 0; k < route_path.points().size(); ++k)
        if (cum[k] > std::max(0.0, pr.arclength - 5.0) + 1e-9)
          trimmed.push_back(route_path.points()[k]);
      if (trimmed.size() < 2) continue;
      Trajectory gt;
      try {
        gt = rollout(initial, Polyline(std::move(trimmed)), profile,
                     pursuit_cfg);
      } catch (const Error&) {
        continue;
      }

      const MetricInput check{gt, true};
      const FeasibilityReport rep =
          feasibility_report(std::span<const MetricInput>(&check, 1),
                             metric_cfg);
      if (!rep.all_zero()) continue;

      ActorState actor(pose, v0, profile.values[0],
                       backfill_history(pose, v0, route_path, s0));
      out.emplace_back(std::move(actor), std::move(gt));
      placed = true;
    }
    if (!placed && warnings)
      warnings->messages.push_back("skipped infeasible actor " +
                                   std::to_string(i));
  }
  return out;
}

Scenario generate_scenario(std::uint64_t seed, MapKind kind,
                           const std::string& id, int n_actors,
                           GenWarnings* warnings) {
  Scenario s;
  s.id = id;
  s.map = generate_map(seed, kind);
  auto pairs = generate_actors(s.map, seed + 1, n_actors, warnings);
  for (auto& [actor, gt] : pairs) {
    s.actors.push_back(std::move(actor));
    s.ground_truth.push_back(std::move(gt));
  }
  return s;
}

namespace {

json vec2_to_json(const Vec2& v) { return json::array({v.x, v.y}); }

Vec2 vec2_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error("expected [x, y]");
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

const char* sign_kind_name(SignKind k) {
  switch (k) {
    case SignKind::Stop: return "stop";
    case SignKind::Yield: return "yield";
    case SignKind::SpeedLimit: return "speed_limit";
  }
  return "?";
}

SignKind sign_kind_parse(const std::string& s) {
  if (s == "stop") return SignKind::Stop;
  if (s == "yield") return SignKind::Yield;
  if (s == "speed_limit") return SignKind::SpeedLimit;
  throw Error("unknown sign kind: " + s);
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["version"] = 1;
  j["id"] = s.id;
  json lanes = json::array();
  for (const Lane& l : s.map.lanes()) {
    json lane;
    lane["id"] = l.id;
    lane["speed_limit"] = l.speed_limit;
    json cl = json::array();
    for (const Vec2& p : l.centerline.points()) cl.push_back(vec2_to_json(p));
    lane["centerline"] = cl;
    json signs = json::array();
    for (const Sign& sg : l.signs)
      signs.push_back({{"pos", vec2_to_json(sg.position)},
                       {"kind", sign_kind_name(sg.kind)}});
    lane["signs"] = signs;
    lanes.push_back(lane);
  }
  j["lanes"] = lanes;
  json edges = json::array();
  for (const auto& [a, b] : s.map.edges()) edges.push_back(json::array({a, b}));
  j["edges"] = edges;
  json actors = json::array();
  for (const ActorState& a : s.actors) {
    json actor;
    actor["pose"] = json::array({a.pose.position.x, a.pose.position.y,
                                 a.pose.heading});
    actor["speed"] = a.speed;
    actor["accel"] = a.acceleration;
    json hist = json::array();
    for (const Vec2& p : a.history) hist.push_back(vec2_to_json(p));
    actor["history"] = hist;
    actors.push_back(actor);
  }
  j["actors"] = actors;
  json gts = json::array();
  for (const Trajectory& t : s.ground_truth) {
    json gt;
    gt["dt"] = t.dt;
    json states = json::array();
    for (const TrajectoryState& st : t.states)
      states.push_back(json::array(
          {st.position.x, st.position.y, st.heading, st.speed}));
    gt["states"] = states;
    gts.push_back(gt);
  }
  j["ground_truth"] = gts;
  return j;
}

Scenario scenario_from_json(const json& j, long line, GenWarnings* warnings) {
  static const std::set<std::string> known{
      "version", "id", "lanes", "edges", "actors", "ground_truth"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()) && warnings)
      warnings->messages.push_back("ignoring unknown field '" + it.key() +
                                   "' on line " + std::to_string(line));
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw Error("unsupported or missing format version");

  Scenario s;
  s.id = j.at("id").get<std::string>();
  std::vector<Lane> lanes;
  for (const json& lj : j.at("lanes")) {
    std::vector<Vec2> pts;
    for (const json& pj : lj.at("centerline")) pts.push_back(vec2_from_json(pj));
    std::vector<Sign> signs;
    if (lj.contains("signs"))
      for (const json& sj : lj.at("signs"))
        signs.push_back(Sign{vec2_from_json(sj.at("pos")),
                             sign_kind_parse(sj.at("kind").get<std::string>())});
    lanes.emplace_back(lj.at("id").get<int>(), Polyline(std::move(pts)),
                       lj.at("speed_limit").get<double>(), std::move(signs));
  }
  std::vector<std::pair<int, int>> edges;
  for (const json& ej : j.at("edges"))
    edges.emplace_back(ej[0].get<int>(), ej[1].get<int>());
  s.map = LaneGraph(std::move(lanes), std::move(edges));

  for (const json& aj : j.at("actors")) {
    const json& pj = aj.at("pose");
    Pose pose{Vec2(pj[0].get<double>(), pj[1].get<double>()),
              pj[2].get<double>()};
    std::vector<Vec2> hist;
    for (const json& hj : aj.at("history")) hist.push_back(vec2_from_json(hj));
    s.actors.emplace_back(pose, aj.at("speed").get<double>(),
                          aj.at("accel").get<double>(), std::move(hist));
  }
  for (const json& tj : j.at("ground_truth")) {
    std::vector<TrajectoryState> states;
    for (const json& sj : tj.at("states"))
      states.push_back(TrajectoryState{
          Vec2(sj[0].get<double>(), sj[1].get<double>()),
          sj[2].get<double>(), sj[3].get<double>()});
    s.ground_truth.emplace_back(tj.at("dt").get<double>(), std::move(states));
  }
  if (s.actors.size() != s.ground_truth.size())
    throw Error("actor and ground-truth counts differ");
  return s;
}

}  // namespace

void write_scenarios(const std::string& path,
                     const std::vector<Scenario>& scenarios) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (const Scenario& s : scenarios) out << scenario_to_json(s).dump() << "\n";
  if (!out) throw Error("failed writing " + path);
}

std::vector<Scenario> read_scenarios(const std::string& path,
                                     GenWarnings* warnings) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::vector<Scenario> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed scenario json", line_no);
    try {
      out.push_back(scenario_from_json(j, line_no, warnings));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return out;
}

std::uint64_t id_hash(const std::string& id) {
  // FNV-1a.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : id) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string split_of(const std::string& id) {
  const std::uint64_t h = id_hash(id) % 100;
  if (h < 70) return "train";
  if (h < 80) return "val";
  return "test";
}

bool in_fraction(const std::string& id, std::uint64_t seed, double fraction) {
  const std::uint64_t h = id_hash(id + "#" + std::to_string(seed));
  const double u = static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
  return u < fraction;
}

}  // namespace ptnet
