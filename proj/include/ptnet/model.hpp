#pragma once

#include <cstdint>
#include <string>

#include "ptnet/checkpoint.hpp"
#include "ptnet/encoder.hpp"
#include "ptnet/predictor.hpp"
#include "ptnet/scenario.hpp"

namespace ptnet {

struct ModelConfig {
  EncoderConfig encoder;
  PredictorConfig predictor;
  PursuitConfig pursuit;
  PathGenConfig paths;
  // Replaces the tracker with a direct waypoint-regression head; the
  // unconstrained baseline for feasibility and sample-efficiency comparisons.
  bool ablation = false;
  std::uint64_t init_seed = 1;
};

/// Encoder + prediction heads + initialization; the unit the trainer and the
/// evaluator operate on.
class Model {
 public:
  explicit Model(ModelConfig cfg);

  const ModelConfig& config() const { return cfg_; }
  ad::ParameterStore& params() { return params_; }
  const ad::ParameterStore& params() const { return params_; }
  bool is_ablation() const { return cfg_.ablation; }

  /// Plain prediction for one actor: multi-modal trajectories in the actor
  /// frame plus joint probabilities.
  ModeSet predict(const LaneGraph& map, const ActorState& actor);

  /// Tape-recorded loss for one training example. gt_world is the actor's
  /// ground-truth future in world coordinates.
  ad::Var training_loss(ad::Tape& tape, const LaneGraph& map,
                        const ActorState& actor, const Trajectory& gt_world);

  void save(const std::string& path) const { params_.save(path); }
  void load(const std::string& path) { params_.load(path); }

 private:
  struct Forward {
    std::vector<GoalPath> paths;
    TapeModeSet modes;
  };
  Forward forward(ad::Tape& tape, const LaneGraph& map, const ActorState& actor);
  TapeModeSet regress_modes(ad::Tape& tape, const EncodedGraph& encoded,
                            const std::vector<GoalPath>& paths);

  ModelConfig cfg_;
  ad::ParameterStore params_;
  EncoderWeights encoder_;
  PredictorWeights predictor_;                 // tracker variant
  std::vector<MlpWeights> regression_heads_;   // ablation variant
  MlpWeights regression_mode_head_;
  MlpWeights regression_goal_head_;
};

/// Ground truth expressed in the actor frame (the frame predictions live in).
Trajectory to_actor_frame(const Trajectory& world, const Pose& actor_pose);
Trajectory to_world_frame(const Trajectory& local, const Pose& actor_pose);

}  // namespace ptnet
