#pragma once

#include <random>
#include <span>
#include <vector>

#include "ptnet/checkpoint.hpp"
#include "ptnet/lane_graph.hpp"
#include "ptnet/tape.hpp"

namespace ptnet {

struct EncoderConfig {
  int path_samples = 10;          // K: arc-length samples per goal descriptor
  int rollout_samples = 6;        // Q: zero-jerk projection samples per edge
  double horizon_sec = 6.0;       // s, span of the zero-jerk rollout
  double sign_distance_cap = 120.0;  // m, sentinel when no sign is near
  double sign_corridor = 5.0;     // m, max lateral offset for a sign to count
  int hidden = 64;                // MLP hidden width
  int embed = 64;                 // embedding width

  int actor_dim() const { return 2 + 2 * kHistoryLen; }
  int goal_dim() const { return 3 * path_samples + 2; }
  int edge_dim() const { return 2 * rollout_samples + 1; }
};

/// [speed, acceleration, past positions in the actor frame, newest first].
std::vector<double> build_actor_features(const ActorState& actor,
                                         const EncoderConfig& cfg);

/// Fixed-size path descriptor: K samples of (x, y, local curvature) at equal
/// arc-length fractions, arc-length distance to the nearest mapped sign
/// (capped), and a map-free flag. Path and outputs are in the actor frame.
std::vector<double> build_goal_features(const GoalPath& path,
                                        const LaneGraph& graph,
                                        const Pose& actor_pose,
                                        const EncoderConfig& cfg);

/// Constant-acceleration (zero-jerk) arc-length rollout projected onto the
/// path at Q evenly spaced times, plus the lateral offset of the straight
/// zero-jerk endpoint from the path.
std::vector<double> build_edge_features(const ActorState& actor,
                                        const GoalPath& path,
                                        const EncoderConfig& cfg);

/// One actor node, one node per goal, one edge per goal.
struct ActorGraph {
  std::vector<double> actor_features;
  std::vector<std::vector<double>> goal_features;
  std::vector<std::vector<double>> edge_features;

  int goal_count() const { return static_cast<int>(goal_features.size()); }
};

ActorGraph build_actor_graph(const ActorState& actor,
                             const std::vector<GoalPath>& paths,
                             const LaneGraph& graph, const EncoderConfig& cfg);

struct MlpWeights {
  ad::Parameter* w1 = nullptr;
  ad::Parameter* b1 = nullptr;
  ad::Parameter* w2 = nullptr;
  ad::Parameter* b2 = nullptr;
};

MlpWeights create_mlp(ad::ParameterStore& store, const std::string& name,
                      int in_dim, int hidden, int out_dim, std::mt19937_64& rng);

/// Two-layer MLP: relu hidden, linear output.
ad::Var mlp_forward(ad::Tape& tape, const MlpWeights& w, ad::Var input);
std::vector<double> mlp_forward_plain(const MlpWeights& w,
                                      std::span<const double> input);

/// Weights of the two-round graph network. Each round applies an edge MLP
/// phi_e(v, e, g) and a node MLP phi_v(v, mean(e)); goal features are inputs
/// only and are never updated.
struct EncoderWeights {
  MlpWeights edge1, node1, edge2, node2;

  static EncoderWeights create(ad::ParameterStore& store,
                               const EncoderConfig& cfg, std::mt19937_64& rng);
};

struct EncodedGraph {
  std::vector<ad::Var> edge_embeddings;  // one per goal
  ad::Var actor_embedding;
};

EncodedGraph gnn_forward(ad::Tape& tape, const ActorGraph& graph,
                         const EncoderWeights& weights);

}  // namespace ptnet
