#pragma once

#include <span>
#include <vector>

#include "ptnet/encoder.hpp"
#include "ptnet/pursuit.hpp"

namespace ptnet {

// Scaled-tanh output bound. Kept strictly inside +-8 (tanh saturates to 1.0
// exactly in doubles) so downstream finite-difference checks of the bound can
// never round past it.
inline constexpr double kAccelScale = 8.0 * (1.0 - 1e-9);

struct PredictorConfig {
  int num_modes = 1;                   // N temporal modes per goal
  int hidden = 64;                     // head MLP hidden width
  double smooth_l1_beta = 1.0;         // m, quadratic/linear transition
  double endpoint_threshold = 3.5;     // m, max endpoint lateral offset
  double mean_lateral_threshold = 2.0; // m, max mean lateral offset
};

/// N independent acceleration heads, a temporal-mode scorer, and a goal
/// scorer, all reading the per-goal edge embedding.
struct PredictorWeights {
  std::vector<MlpWeights> accel_heads;
  MlpWeights mode_head;
  MlpWeights goal_head;

  static PredictorWeights create(ad::ParameterStore& store,
                                 const PredictorConfig& cfg, int embed_dim,
                                 int horizon, std::mt19937_64& rng);
};

struct Mode {
  int goal = 0;
  int temporal = 0;
  Trajectory trajectory;     // actor frame
  double probability = 0.0;  // joint over (goal, temporal); sums to 1
};

struct ModeSet {
  std::vector<Mode> modes;
};

/// Tape-recorded prediction for one actor: everything a training step needs.
struct TapeMode {
  int goal = 0;
  int temporal = 0;
  ad::Var log_prob;          // log of the joint mode probability
  double probability = 0.0;
  std::vector<ad::Var> accel;
  TapeRollout rollout;
};

struct TapeModeSet {
  std::vector<TapeMode> modes;

  ModeSet to_plain() const;
};

/// For each goal j and head n: accel profile = scaled tanh of the head output,
/// trajectory = pursuit rollout of that profile along goal path j. The joint
/// probability factorizes as softmax over goals times per-goal softmax over
/// temporal modes.
TapeModeSet predict_modes_on_tape(ad::Tape& tape, const EncodedGraph& encoded,
                                  const ActorState& actor,
                                  const std::vector<GoalPath>& paths,
                                  const PredictorWeights& weights,
                                  const PredictorConfig& cfg,
                                  const PursuitConfig& pursuit);

/// Goal indices whose path matches the ground truth: endpoint lateral offset
/// within endpoint_threshold and mean waypoint lateral offset within
/// mean_lateral_threshold. Falls back to the single smallest-mean path so the
/// result is never empty. Ground truth must be in the actor frame.
std::vector<int> label_goals(const std::vector<GoalPath>& paths,
                             const Trajectory& ground_truth,
                             const PredictorConfig& cfg);

/// Mode classification cross-entropy plus probability-weighted smooth-L1
/// trajectory error. Target probability: 1/|G*| on each matching goal, one-hot
/// on the temporal head with the smallest summed L1 distance to ground truth
/// (ties to the lower head index); zero elsewhere, so losing heads receive
/// exactly zero trajectory gradient.
ad::Var compute_loss(ad::Tape& tape, const TapeModeSet& modes,
                     const std::vector<int>& matching_goals,
                     const Trajectory& ground_truth, const PredictorConfig& cfg);

}  // namespace ptnet
