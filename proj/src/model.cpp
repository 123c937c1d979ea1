#include "ptnet/model.hpp"

#include <cmath>

namespace ptnet {

Trajectory to_actor_frame(const Trajectory& world, const Pose& actor_pose) {
  std::vector<TrajectoryState> states;
  states.reserve(world.states.size());
  for (const TrajectoryState& s : world.states)
    states.push_back(TrajectoryState{transform_to_frame(s.position, actor_pose),
                                     heading_to_frame(s.heading, actor_pose),
                                     s.speed});
  return Trajectory(world.dt, std::move(states));
}

Trajectory to_world_frame(const Trajectory& local, const Pose& actor_pose) {
  std::vector<TrajectoryState> states;
  states.reserve(local.states.size());
  for (const TrajectoryState& s : local.states)
    states.push_back(
        TrajectoryState{transform_from_frame(s.position, actor_pose),
                        heading_from_frame(s.heading, actor_pose), s.speed});
  return Trajectory(local.dt, std::move(states));
}

Model::Model(ModelConfig cfg) : cfg_(cfg) {
  std::mt19937_64 rng(cfg_.init_seed);
  encoder_ = EncoderWeights::create(params_, cfg_.encoder, rng);
  if (cfg_.ablation) {
    for (int n = 0; n < cfg_.predictor.num_modes; ++n)
      regression_heads_.push_back(
          create_mlp(params_, "regress.waypoints" + std::to_string(n),
                     cfg_.encoder.embed, cfg_.predictor.hidden,
                     2 * cfg_.pursuit.horizon, rng));
    regression_mode_head_ =
        create_mlp(params_, "regress.mode", cfg_.encoder.embed,
                   cfg_.predictor.hidden, cfg_.predictor.num_modes, rng);
    regression_goal_head_ = create_mlp(params_, "regress.goal",
                                       cfg_.encoder.embed,
                                       cfg_.predictor.hidden, 1, rng);
  } else {
    predictor_ = PredictorWeights::create(params_, cfg_.predictor,
                                          cfg_.encoder.embed,
                                          cfg_.pursuit.horizon, rng);
  }
}

TapeModeSet Model::regress_modes(ad::Tape& tape, const EncodedGraph& encoded,
                                 const std::vector<GoalPath>& paths) {
  const int n_goals = static_cast<int>(paths.size());
  const int T = cfg_.pursuit.horizon;
  const double dt = cfg_.pursuit.dt;

  std::vector<ad::Var> goal_logits(n_goals);
  for (int j = 0; j < n_goals; ++j)
    goal_logits[j] = mlp_forward(tape, regression_goal_head_,
                                 encoded.edge_embeddings[static_cast<size_t>(j)]);
  ad::Var goal_probs = tape.softmax(tape.concat(goal_logits));
  ad::Var log_goal_probs = tape.log(goal_probs);

  TapeModeSet out;
  for (int j = 0; j < n_goals; ++j) {
    ad::Var embed = encoded.edge_embeddings[static_cast<size_t>(j)];
    ad::Var mode_probs =
        tape.softmax(mlp_forward(tape, regression_mode_head_, embed));
    ad::Var log_mode_probs = tape.log(mode_probs);
    for (int n = 0; n < cfg_.predictor.num_modes; ++n) {
      ad::Var waypoints =
          mlp_forward(tape, regression_heads_[static_cast<size_t>(n)], embed);
      TapeMode mode;
      mode.goal = j;
      mode.temporal = n;
      mode.rollout.x.reserve(T);
      mode.rollout.y.reserve(T);
      std::vector<TrajectoryState> states;
      states.reserve(T);
      Vec2 prev{0.0, 0.0};
      for (int t = 0; t < T; ++t) {
        mode.rollout.x.push_back(tape.index(waypoints, 2 * t));
        mode.rollout.y.push_back(tape.index(waypoints, 2 * t + 1));
        const Vec2 p{mode.rollout.x.back().value(),
                     mode.rollout.y.back().value()};
        const Vec2 d = p - prev;
        // No modeled heading: motion heading and chord speed stand in.
        const double heading =
            d.norm() > 1e-12 ? std::atan2(-d.x, d.y)
                             : (states.empty() ? 0.0 : states.back().heading);
        states.push_back(TrajectoryState{p, heading, d.norm() / dt});
        prev = p;
      }
      mode.rollout.trajectory = Trajectory(dt, std::move(states));
      mode.log_prob =
          tape.index(log_goal_probs, j) + tape.index(log_mode_probs, n);
      mode.probability = goal_probs.value(j) * mode_probs.value(n);
      out.modes.push_back(std::move(mode));
    }
  }
  return out;
}

Model::Forward Model::forward(ad::Tape& tape, const LaneGraph& map,
                              const ActorState& actor) {
  Forward f;
  f.paths = build_goal_paths(map, actor, cfg_.paths);
  const ActorGraph graph = build_actor_graph(actor, f.paths, map, cfg_.encoder);
  const EncodedGraph encoded = gnn_forward(tape, graph, encoder_);
  f.modes = cfg_.ablation
                ? regress_modes(tape, encoded, f.paths)
                : predict_modes_on_tape(tape, encoded, actor, f.paths,
                                        predictor_, cfg_.predictor,
                                        cfg_.pursuit);
  return f;
}

ModeSet Model::predict(const LaneGraph& map, const ActorState& actor) {
  ad::Tape tape;
  return forward(tape, map, actor).modes.to_plain();
}

ad::Var Model::training_loss(ad::Tape& tape, const LaneGraph& map,
                             const ActorState& actor,
                             const Trajectory& gt_world) {
  if (gt_world.size() != cfg_.pursuit.horizon)
    throw ShapeError("ground truth length != prediction horizon");
  Forward f = forward(tape, map, actor);
  const Trajectory gt_local = to_actor_frame(gt_world, actor.pose);
  const std::vector<int> matches =
      label_goals(f.paths, gt_local, cfg_.predictor);
  return compute_loss(tape, f.modes, matches, gt_local, cfg_.predictor);
}

}  // namespace ptnet
