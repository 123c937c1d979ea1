#pragma once

#include <utility>
#include <vector>

#include "ptnet/polyline.hpp"
#include "ptnet/types.hpp"

namespace ptnet {

enum class SignKind { Stop, Yield, SpeedLimit };

struct Sign {
  Vec2 position;
  SignKind kind = SignKind::Stop;
};

struct Lane {
  int id = 0;
  Polyline centerline;
  double speed_limit = 15.0;  // m/s
  std::vector<Sign> signs;

  Lane(int id_in, Polyline cl, double limit = 15.0, std::vector<Sign> s = {})
      : id(id_in), centerline(std::move(cl)), speed_limit(limit),
        signs(std::move(s)) {}
};

/// Directed lane graph: nodes are branch-free lanes, an edge a->b means b is
/// a successor of a. Successor centerlines must start within kJoinTolerance
/// of the predecessor's end.
class LaneGraph {
 public:
  static constexpr double kJoinTolerance = 0.5;

  LaneGraph() = default;
  LaneGraph(std::vector<Lane> lanes, std::vector<std::pair<int, int>> edges);

  const std::vector<Lane>& lanes() const { return lanes_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const Lane& lane(int id) const;
  bool has_lane(int id) const;
  const std::vector<int>& successors(int id) const;
  bool empty() const { return lanes_.empty(); }

 private:
  std::vector<Lane> lanes_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> succ_;  // indexed like lanes_
  std::vector<int> index_of_id_;
  int index(int id) const;
};

enum class PathSource { MapBased, MapFree };

/// A candidate reference path in the actor frame. Map-based paths follow lane
/// centerlines; the map-free path is a straight ray along the actor heading.
struct GoalPath {
  Polyline path;
  PathSource source = PathSource::MapFree;
  std::vector<int> lane_ids;
};

struct PathGenConfig {
  double query_radius = 2.0;     // m, lane search radius around the actor
  double horizon_length = 120.0; // m, rollout length along the graph
  double tail_length = 5.0;      // m kept behind the actor's projection
  int max_paths = 16;            // map-based path cap, nearest lane first
  double lookahead = 10.0;       // m, must match the tracker's circle
};

/// Lanes whose centerline comes within `radius` of `position`, ordered by
/// minimum distance (nearest first).
std::vector<int> query_nearby_lanes(const LaneGraph& graph, const Vec2& position,
                                    double radius);

/// Depth-first successor traversal from each start lane until the accumulated
/// centerline length reaches `horizon_length` or a sink; one lane-id sequence
/// per distinct branch, exact duplicates removed. A lane repeating within one
/// sequence (cycle) ends that sequence.
std::vector<std::vector<int>> rollout_paths(const LaneGraph& graph,
                                            const std::vector<int>& start_lanes,
                                            double horizon_length);

/// Map-based paths for each rollout sequence (trimmed to start tail_length
/// behind the actor's projection, transformed to the actor frame) plus exactly
/// one map-free straight path. Every returned path intersects the lookahead
/// circle around the origin.
std::vector<GoalPath> build_goal_paths(const LaneGraph& graph,
                                       const ActorState& actor,
                                       const PathGenConfig& config);

}  // namespace ptnet
