#include "ptnet/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ptnet {

PredictorWeights PredictorWeights::create(ad::ParameterStore& store,
                                          const PredictorConfig& cfg,
                                          int embed_dim, int horizon,
                                          std::mt19937_64& rng) {
  if (cfg.num_modes < 1) throw Error("need >= 1 temporal mode");
  PredictorWeights w;
  for (int n = 0; n < cfg.num_modes; ++n)
    w.accel_heads.push_back(create_mlp(store,
                                       "predictor.accel" + std::to_string(n),
                                       embed_dim, cfg.hidden, horizon, rng));
  w.mode_head = create_mlp(store, "predictor.mode", embed_dim, cfg.hidden,
                           cfg.num_modes, rng);
  w.goal_head = create_mlp(store, "predictor.goal", embed_dim, cfg.hidden, 1,
                           rng);
  return w;
}

ModeSet TapeModeSet::to_plain() const {
  ModeSet out;
  out.modes.reserve(modes.size());
  for (const TapeMode& m : modes)
    out.modes.push_back(
        Mode{m.goal, m.temporal, m.rollout.trajectory, m.probability});
  return out;
}

TapeModeSet predict_modes_on_tape(ad::Tape& tape, const EncodedGraph& encoded,
                                  const ActorState& actor,
                                  const std::vector<GoalPath>& paths,
                                  const PredictorWeights& weights,
                                  const PredictorConfig& cfg,
                                  const PursuitConfig& pursuit) {
  const int n_goals = static_cast<int>(paths.size());
  if (n_goals < 1) throw Error("predict_modes needs >= 1 goal path");
  if (static_cast<int>(encoded.edge_embeddings.size()) != n_goals)
    throw ShapeError("embedding count != goal count");

  // Goal scores across goals, temporal scores within each goal.
  std::vector<ad::Var> goal_logits(n_goals);
  for (int j = 0; j < n_goals; ++j)
    goal_logits[j] = mlp_forward(
        tape, weights.goal_head,
        encoded.edge_embeddings[static_cast<size_t>(j)]);
  ad::Var goal_probs = tape.softmax(tape.concat(goal_logits));
  ad::Var log_goal_probs = tape.log(goal_probs);

  const TrackingState initial{{0.0, 0.0}, actor.speed, 0.0};

  TapeModeSet out;
  for (int j = 0; j < n_goals; ++j) {
    ad::Var embed = encoded.edge_embeddings[static_cast<size_t>(j)];
    ad::Var mode_probs =
        tape.softmax(mlp_forward(tape, weights.mode_head, embed));
    ad::Var log_mode_probs = tape.log(mode_probs);

    for (int n = 0; n < cfg.num_modes; ++n) {
      ad::Var raw = mlp_forward(tape, weights.accel_heads[static_cast<size_t>(n)],
                                embed);
      ad::Var profile = tape.mul(tape.constant_filled(pursuit.horizon,
                                                      kAccelScale),
                                 tape.tanh(raw));
      std::vector<ad::Var> accel(static_cast<size_t>(pursuit.horizon));
      for (int t = 0; t < pursuit.horizon; ++t) accel[t] = tape.index(profile, t);

      TapeMode mode;
      mode.goal = j;
      mode.temporal = n;
      mode.accel = accel;
      mode.rollout = rollout_on_tape(tape, initial,
                                     paths[static_cast<size_t>(j)].path, accel,
                                     pursuit);
      mode.log_prob =
          tape.index(log_goal_probs, j) + tape.index(log_mode_probs, n);
      mode.probability =
          goal_probs.value(j) * mode_probs.value(n);
      out.modes.push_back(std::move(mode));
    }
  }
  return out;
}

std::vector<int> label_goals(const std::vector<GoalPath>& paths,
                             const Trajectory& ground_truth,
                             const PredictorConfig& cfg) {
  if (paths.empty()) throw Error("label_goals needs >= 1 path");
  std::vector<int> matches;
  int best = 0;
  double best_mean = std::numeric_limits<double>::infinity();
  for (int j = 0; j < static_cast<int>(paths.size()); ++j) {
    const Polyline& path = paths[static_cast<size_t>(j)].path;
    double sum_abs = 0.0;
    for (const TrajectoryState& s : ground_truth.states)
      sum_abs += std::abs(project_point(s.position, path).lateral);
    const double mean_abs = sum_abs / ground_truth.size();
    const double endpoint =
        std::abs(project_point(ground_truth.states.back().position, path).lateral);
    if (endpoint <= cfg.endpoint_threshold &&
        mean_abs <= cfg.mean_lateral_threshold)
      matches.push_back(j);
    if (mean_abs < best_mean) {
      best_mean = mean_abs;
      best = j;
    }
  }
  if (matches.empty()) matches.push_back(best);
  return matches;
}

namespace {

double l1_distance(const Trajectory& a, const Trajectory& b) {
  double total = 0.0;
  for (int t = 0; t < a.size(); ++t) {
    total += std::abs(a.states[static_cast<size_t>(t)].position.x -
                      b.states[static_cast<size_t>(t)].position.x);
    total += std::abs(a.states[static_cast<size_t>(t)].position.y -
                      b.states[static_cast<size_t>(t)].position.y);
  }
  return total;
}

// Smooth L1 over all waypoint coordinates. The quadratic/linear branch is a
// value-level choice; the two branches agree in value and slope at |d| = beta.
ad::Var smooth_l1(ad::Tape& tape, const TapeRollout& rollout,
                  const Trajectory& gt, double beta) {
  ad::Var total = tape.constant(0.0);
  for (int t = 0; t < static_cast<int>(rollout.x.size()); ++t) {
    const Vec2 target = gt.states[static_cast<size_t>(t)].position;
    for (int axis = 0; axis < 2; ++axis) {
      ad::Var d = (axis == 0 ? rollout.x[static_cast<size_t>(t)]
                             : rollout.y[static_cast<size_t>(t)]) -
                  (axis == 0 ? target.x : target.y);
      const double dv = std::abs(d.value());
      if (dv <= beta)
        total = total + (0.5 / beta) * (d * d);
      else
        total = total + (d.tape->abs(d) - 0.5 * beta);
    }
  }
  return total;
}

}  // namespace

ad::Var compute_loss(ad::Tape& tape, const TapeModeSet& modes,
                     const std::vector<int>& matching_goals,
                     const Trajectory& ground_truth,
                     const PredictorConfig& cfg) {
  if (matching_goals.empty()) throw Error("matching goal set must not be empty");

  // Winner-takes-all within each matching goal, by plain L1 distance.
  std::vector<std::pair<int, int>> winners;  // (goal, mode index in set)
  for (int j : matching_goals) {
    int best_idx = -1;
    double best_l1 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(modes.modes.size()); ++i) {
      const TapeMode& m = modes.modes[static_cast<size_t>(i)];
      if (m.goal != j) continue;
      const double l1 = l1_distance(m.rollout.trajectory, ground_truth);
      if (l1 < best_l1) {  // strict <: ties go to the lower temporal index
        best_l1 = l1;
        best_idx = i;
      }
    }
    if (best_idx < 0) throw Error("no temporal mode for matching goal");
    winners.emplace_back(j, best_idx);
  }

  const double target_p = 1.0 / static_cast<double>(matching_goals.size());
  ad::Var loss = tape.constant(0.0);
  for (const auto& [goal, idx] : winners) {
    const TapeMode& m = modes.modes[static_cast<size_t>(idx)];
    // Non-winning modes have target probability zero: their terms are never
    // recorded, so their trajectory gradients are exactly zero.
    loss = loss - target_p * m.log_prob;
    loss = loss +
           target_p * smooth_l1(tape, m.rollout, ground_truth, cfg.smooth_l1_beta);
  }
  return loss;
}

}  // namespace ptnet
