#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ptnet/lane_graph.hpp"
#include "ptnet/types.hpp"

namespace ptnet {

enum class MapKind { Straight, Curve, Fork, Merge, Grid };

MapKind map_kind_from_string(const std::string& s);
std::string to_string(MapKind k);

/// One prediction sample: a map, tracked actors, and the future each actor
/// actually drove. Generated ground truth always satisfies every feasibility
/// metric (the driving oracle is the tracker itself, on tighter accel bounds).
struct Scenario {
  std::string id;
  LaneGraph map;
  std::vector<ActorState> actors;
  std::vector<Trajectory> ground_truth;  // world frame, one per actor
};

struct ScenarioSet {
  std::vector<Scenario> scenarios;
  std::string split;  // train | val | test
  std::uint64_t seed = 0;
};

LaneGraph generate_map(std::uint64_t seed, MapKind kind);

struct GenWarnings {
  std::vector<std::string> messages;
};

/// Places n actors near lanes and drives each along a random route with a
/// smooth random acceleration profile (piecewise linear at 1 s knots, within
/// [-4, 4] m/s^2, jerk <= 4 m/s^3). Infeasible placements retry up to 20
/// times, then are skipped with a warning.
std::vector<std::pair<ActorState, Trajectory>> generate_actors(
    const LaneGraph& map, std::uint64_t seed, int n,
    GenWarnings* warnings = nullptr);

Scenario generate_scenario(std::uint64_t seed, MapKind kind,
                           const std::string& id, int n_actors,
                           GenWarnings* warnings = nullptr);

/// Line-delimited JSON, one scenario per line, format version field on every
/// line. Numeric fields round-trip bit-exactly. Unknown fields are ignored
/// (recorded in warnings); malformed lines raise ParseError with the line
/// number.
void write_scenarios(const std::string& path,
                     const std::vector<Scenario>& scenarios);
std::vector<Scenario> read_scenarios(const std::string& path,
                                     GenWarnings* warnings = nullptr);

/// Stable id hash used for splits and subsampling.
std::uint64_t id_hash(const std::string& id);
/// train / val / test split by id hash (70 / 10 / 20).
std::string split_of(const std::string& id);
/// Nested fraction membership: for a fixed seed, the kept set at fraction f1
/// is a subset of the kept set at any f2 >= f1.
bool in_fraction(const std::string& id, std::uint64_t seed, double fraction);

}  // namespace ptnet
