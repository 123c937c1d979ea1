#include "ptnet/lane_graph.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace ptnet {

LaneGraph::LaneGraph(std::vector<Lane> lanes,
                     std::vector<std::pair<int, int>> edges)
    : lanes_(std::move(lanes)), edges_(std::move(edges)) {
  int max_id = -1;
  for (const Lane& l : lanes_) max_id = std::max(max_id, l.id);
  index_of_id_.assign(max_id + 1, -1);
  for (size_t i = 0; i < lanes_.size(); ++i) {
    if (lanes_[i].id < 0) throw Error("lane ids must be >= 0");
    if (index_of_id_[lanes_[i].id] != -1)
      throw Error("duplicate lane id " + std::to_string(lanes_[i].id));
    index_of_id_[lanes_[i].id] = static_cast<int>(i);
  }
  succ_.resize(lanes_.size());
  for (const auto& [from, to] : edges_) {
    if (!has_lane(from) || !has_lane(to))
      throw Error("edge references unknown lane");
    const Lane& a = lane(from);
    const Lane& b = lane(to);
    const double gap =
        (b.centerline.points().front() - a.centerline.points().back()).norm();
    if (gap > kJoinTolerance)
      throw Error("successor lane " + std::to_string(to) + " starts " +
                  std::to_string(gap) + " m from predecessor end");
    succ_[index(from)].push_back(to);
  }
}

int LaneGraph::index(int id) const {
  if (!has_lane(id)) throw Error("unknown lane id " + std::to_string(id));
  return index_of_id_[id];
}

bool LaneGraph::has_lane(int id) const {
  return id >= 0 && id < static_cast<int>(index_of_id_.size()) &&
         index_of_id_[id] != -1;
}

const Lane& LaneGraph::lane(int id) const { return lanes_[index(id)]; }

const std::vector<int>& LaneGraph::successors(int id) const {
  return succ_[index(id)];
}

std::vector<int> query_nearby_lanes(const LaneGraph& graph, const Vec2& position,
                                    double radius) {
  if (radius <= 0.0) throw Error("query radius must be > 0");
  std::vector<std::pair<double, int>> hits;
  for (const Lane& l : graph.lanes()) {
    const Projection pr = project_point(position, l.centerline);
    const double d = (position - l.centerline.point_at(pr.arclength)).norm();
    if (d <= radius) hits.emplace_back(d, l.id);
  }
  std::sort(hits.begin(), hits.end());
  std::vector<int> ids;
  ids.reserve(hits.size());
  for (auto& [d, id] : hits) ids.push_back(id);
  return ids;
}

namespace {

void rollout_dfs(const LaneGraph& graph, std::vector<int>& current,
                 double accumulated, double horizon,
                 std::vector<std::vector<int>>& out) {
  const int tip = current.back();
  if (accumulated >= horizon) {
    out.push_back(current);
    return;
  }
  const auto& next = graph.successors(tip);
  bool extended = false;
  for (int s : next) {
    if (std::find(current.begin(), current.end(), s) != current.end())
      continue;  // cycle: stop this branch rather than loop forever
    current.push_back(s);
    rollout_dfs(graph, current, accumulated + graph.lane(s).centerline.length(),
                horizon, out);
    current.pop_back();
    extended = true;
  }
  if (!extended) out.push_back(current);  // sink or all successors repeat
}

}  // namespace

std::vector<std::vector<int>> rollout_paths(const LaneGraph& graph,
                                            const std::vector<int>& start_lanes,
                                            double horizon_length) {
  if (horizon_length <= 0.0) throw Error("horizon length must be > 0");
  std::vector<std::vector<int>> sequences;
  for (int id : start_lanes) {
    std::vector<int> current{id};
    rollout_dfs(graph, current, graph.lane(id).centerline.length(),
                horizon_length, sequences);
  }
  std::vector<std::vector<int>> unique;
  std::set<std::vector<int>> seen;
  for (auto& s : sequences)
    if (seen.insert(s).second) unique.push_back(std::move(s));
  return unique;
}

namespace {

Polyline concatenate_centerlines(const LaneGraph& graph,
                                 const std::vector<int>& seq) {
  std::vector<Vec2> pts;
  for (int id : seq) {
    const auto& cl = graph.lane(id).centerline.points();
    size_t start = 0;
    if (!pts.empty() && (cl.front() - pts.back()).norm() < 1e-6)
      start = 1;  // drop the repeated junction point
    pts.insert(pts.end(), cl.begin() + start, cl.end());
  }
  return Polyline(std::move(pts));
}

/// Trims to [proj - tail, end] and, when the remaining path would end inside
/// the lookahead circle, extends it straight past the circle so the tracker's
/// initial intersection always exists.
Polyline trim_for_tracking(const Polyline& path, const Vec2& actor_pos,
                           double tail, double lookahead) {
  const Projection pr = project_point(actor_pos, path);
  const double start_s = std::max(0.0, pr.arclength - tail);
  std::vector<Vec2> pts;
  pts.push_back(path.point_at(start_s));
  const auto& cum = path.cumulative_arclength();
  for (size_t i = 0; i < path.points().size(); ++i)
    if (cum[i] > start_s + 1e-9) pts.push_back(path.points()[i]);
  if (pts.size() < 2) pts.push_back(path.points().back());
  Polyline trimmed(std::move(pts));

  const double reach = lookahead * 1.2;
  const Vec2 end = trimmed.points().back();
  if ((end - actor_pos).norm() < reach) {
    const Vec2 dir = trimmed.direction_at(trimmed.length());
    const double extension =
        reach - (end - actor_pos).norm() + lookahead;
    std::vector<Vec2> extended = trimmed.points();
    extended.push_back(end + dir * extension);
    return Polyline(std::move(extended));
  }
  return trimmed;
}

}  // namespace

std::vector<GoalPath> build_goal_paths(const LaneGraph& graph,
                                       const ActorState& actor,
                                       const PathGenConfig& config) {
  std::vector<GoalPath> out;

  if (!graph.empty()) {
    const std::vector<int> near =
        query_nearby_lanes(graph, actor.pose.position, config.query_radius);
    std::vector<std::vector<int>> sequences =
        rollout_paths(graph, near, config.horizon_length);
    // query_nearby_lanes orders start lanes nearest-first and rollout_paths
    // preserves that order, so the cap keeps the closest branches.
    if (static_cast<int>(sequences.size()) > config.max_paths)
      sequences.resize(config.max_paths);
    for (const auto& seq : sequences) {
      Polyline world = concatenate_centerlines(graph, seq);
      Polyline trimmed = trim_for_tracking(world, actor.pose.position,
                                           config.tail_length, config.lookahead);
      out.push_back(GoalPath{transform_polyline(trimmed, actor.pose),
                             PathSource::MapBased, seq});
    }
  }

  // The map-free path: straight along the current heading, which in the actor
  // frame is the +y axis.
  std::vector<Vec2> ray{{0.0, 0.0}, {0.0, config.horizon_length}};
  out.push_back(GoalPath{Polyline(std::move(ray)), PathSource::MapFree, {}});
  return out;
}

}  // namespace ptnet
