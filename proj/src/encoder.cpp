#include "ptnet/encoder.hpp"

#include <algorithm>
#include <cmath>

#include "ptnet/kernels.hpp"
#include "ptnet/pursuit.hpp"

namespace ptnet {

std::vector<double> build_actor_features(const ActorState& actor,
                                         const EncoderConfig& cfg) {
  std::vector<double> f;
  f.reserve(cfg.actor_dim());
  f.push_back(actor.speed);
  f.push_back(actor.acceleration);
  // History is stored oldest first; emit newest first so the leading entries
  // are the most recent offsets.
  for (auto it = actor.history.rbegin(); it != actor.history.rend(); ++it) {
    const Vec2 local = transform_to_frame(*it, actor.pose);
    f.push_back(local.x);
    f.push_back(local.y);
  }
  return f;
}

namespace {

// Three-point curvature estimate at arc length s, from points half a step on
// either side. Zero on straight stretches and near the ends.
double local_curvature(const Polyline& path, double s, double half_step) {
  const double s0 = std::max(0.0, s - half_step);
  const double s1 = std::min(path.length(), s + half_step);
  if (s1 - s0 < 1e-6) return 0.0;
  const Vec2 d0 = path.direction_at(s0 + 1e-9);
  const Vec2 d1 = path.direction_at(s1 - 1e-9);
  const double dh = std::atan2(d0.cross(d1), d0.dot(d1));
  return dh / (s1 - s0);
}

}  // namespace

std::vector<double> build_goal_features(const GoalPath& path,
                                        const LaneGraph& graph,
                                        const Pose& actor_pose,
                                        const EncoderConfig& cfg) {
  const int K = cfg.path_samples;
  const double total = path.path.length();
  std::vector<double> f;
  f.reserve(cfg.goal_dim());
  const double half_step = std::max(1.0, total / (2.0 * (K - 1)));
  for (int k = 0; k < K; ++k) {
    const double s = total * static_cast<double>(k) / (K - 1);
    const Vec2 p = path.path.point_at(s);
    f.push_back(p.x);
    f.push_back(p.y);
    f.push_back(local_curvature(path.path, s, half_step));
  }

  double sign_dist = cfg.sign_distance_cap;
  if (path.source == PathSource::MapBased) {
    for (int lane_id : path.lane_ids) {
      for (const Sign& sign : graph.lane(lane_id).signs) {
        const Vec2 local = transform_to_frame(sign.position, actor_pose);
        const Projection pr = project_point(local, path.path);
        if (std::abs(pr.lateral) <= cfg.sign_corridor)
          sign_dist = std::min(sign_dist, pr.arclength);
      }
    }
  }
  f.push_back(std::min(sign_dist, cfg.sign_distance_cap));
  f.push_back(path.source == PathSource::MapFree ? 1.0 : 0.0);
  return f;
}

namespace {

// Arc length travelled under constant acceleration with a standstill floor:
// s(t) = v0 t + a t^2 / 2 until the speed hits zero, constant afterwards.
double zero_jerk_arclength(double v0, double a0, double t) {
  if (a0 < 0.0 && v0 + a0 * t < 0.0) {
    const double t_stop = -v0 / a0;
    return v0 * t_stop + 0.5 * a0 * t_stop * t_stop;
  }
  return std::max(0.0, v0 * t + 0.5 * a0 * t * t);
}

}  // namespace

std::vector<double> build_edge_features(const ActorState& actor,
                                        const GoalPath& path,
                                        const EncoderConfig& cfg) {
  const int Q = cfg.rollout_samples;
  std::vector<double> f;
  f.reserve(cfg.edge_dim());
  for (int q = 1; q <= Q; ++q) {
    const double t = cfg.horizon_sec * static_cast<double>(q) / Q;
    const double s =
        std::min(zero_jerk_arclength(actor.speed, actor.acceleration, t),
                 path.path.length());
    const Vec2 p = path.path.point_at(s);
    f.push_back(p.x);
    f.push_back(p.y);
  }
  // Straight-line zero-jerk endpoint: along the heading, i.e. +y in the actor
  // frame; its lateral offset from the path measures path/intent divergence.
  const double s_end =
      zero_jerk_arclength(actor.speed, actor.acceleration, cfg.horizon_sec);
  const Vec2 straight_end{0.0, s_end};
  f.push_back(project_point(straight_end, path.path).lateral);
  return f;
}

ActorGraph build_actor_graph(const ActorState& actor,
                             const std::vector<GoalPath>& paths,
                             const LaneGraph& graph, const EncoderConfig& cfg) {
  if (paths.empty()) throw Error("actor graph needs >= 1 goal path");
  ActorGraph g;
  g.actor_features = build_actor_features(actor, cfg);
  g.goal_features.reserve(paths.size());
  g.edge_features.reserve(paths.size());
  for (const GoalPath& p : paths) {
    g.goal_features.push_back(build_goal_features(p, graph, actor.pose, cfg));
    g.edge_features.push_back(build_edge_features(actor, p, cfg));
  }
  return g;
}

MlpWeights create_mlp(ad::ParameterStore& store, const std::string& name,
                      int in_dim, int hidden, int out_dim,
                      std::mt19937_64& rng) {
  MlpWeights w;
  w.w1 = &store.create(name + ".w1", hidden, in_dim);
  w.b1 = &store.create(name + ".b1", hidden);
  w.w2 = &store.create(name + ".w2", out_dim, hidden);
  w.b2 = &store.create(name + ".b2", out_dim);
  auto init = [&rng](ad::Parameter& p, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : p.value) {
      // 53-bit uniform in [0, 1); avoids distribution-implementation drift.
      const double u =
          static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
      v = bound * (2.0 * u - 1.0);
    }
  };
  init(*w.w1, in_dim);
  init(*w.b1, in_dim);
  init(*w.w2, hidden);
  init(*w.b2, hidden);
  return w;
}

ad::Var mlp_forward(ad::Tape& tape, const MlpWeights& w, ad::Var input) {
  ad::Var h = tape.relu(
      tape.vecadd(tape.matvec(tape.param(*w.w1), input), tape.param(*w.b1)));
  return tape.vecadd(tape.matvec(tape.param(*w.w2), h), tape.param(*w.b2));
}

std::vector<double> mlp_forward_plain(const MlpWeights& w,
                                      std::span<const double> input) {
  std::vector<double> h(static_cast<size_t>(w.w1->rows));
  kernels::matvec(w.w1->value.data(), static_cast<size_t>(w.w1->rows),
                  static_cast<size_t>(w.w1->cols), input.data(), h.data());
  kernels::add(h.data(), w.b1->value.data(), h.data(), h.size());
  kernels::relu(h.data(), h.data(), h.size());
  std::vector<double> out(static_cast<size_t>(w.w2->rows));
  kernels::matvec(w.w2->value.data(), static_cast<size_t>(w.w2->rows),
                  static_cast<size_t>(w.w2->cols), h.data(), out.data());
  kernels::add(out.data(), w.b2->value.data(), out.data(), out.size());
  return out;
}

EncoderWeights EncoderWeights::create(ad::ParameterStore& store,
                                      const EncoderConfig& cfg,
                                      std::mt19937_64& rng) {
  const int dv = cfg.actor_dim();
  const int dg = cfg.goal_dim();
  const int de = cfg.edge_dim();
  const int e = cfg.embed;
  EncoderWeights w;
  w.edge1 = create_mlp(store, "encoder.edge1", dv + de + dg, cfg.hidden, e, rng);
  w.node1 = create_mlp(store, "encoder.node1", dv + de, cfg.hidden, e, rng);
  w.edge2 = create_mlp(store, "encoder.edge2", e + e + dg, cfg.hidden, e, rng);
  w.node2 = create_mlp(store, "encoder.node2", e + e, cfg.hidden, e, rng);
  return w;
}

EncodedGraph gnn_forward(ad::Tape& tape, const ActorGraph& graph,
                         const EncoderWeights& weights) {
  const int n = graph.goal_count();
  if (n < 1) throw ShapeError("graph needs >= 1 goal node");

  ad::Var v0 = tape.constant(graph.actor_features);
  std::vector<ad::Var> g(n), e0(n);
  for (int j = 0; j < n; ++j) {
    g[j] = tape.constant(graph.goal_features[static_cast<size_t>(j)]);
    e0[j] = tape.constant(graph.edge_features[static_cast<size_t>(j)]);
  }

  // Round 1. Node update aggregates the previous layer's edges.
  std::vector<ad::Var> e1(n);
  for (int j = 0; j < n; ++j) {
    std::vector<ad::Var> parts{v0, e0[static_cast<size_t>(j)],
                               g[static_cast<size_t>(j)]};
    e1[j] = mlp_forward(tape, weights.edge1, tape.concat(parts));
  }
  ad::Var psi0 = tape.mean_vecs(e0);
  std::vector<ad::Var> nv{v0, psi0};
  ad::Var v1 = mlp_forward(tape, weights.node1, tape.concat(nv));

  // Round 2.
  std::vector<ad::Var> e2(n);
  for (int j = 0; j < n; ++j) {
    std::vector<ad::Var> parts{v1, e1[static_cast<size_t>(j)],
                               g[static_cast<size_t>(j)]};
    e2[j] = mlp_forward(tape, weights.edge2, tape.concat(parts));
  }
  ad::Var psi1 = tape.mean_vecs(e1);
  std::vector<ad::Var> nv2{v1, psi1};
  ad::Var v2 = mlp_forward(tape, weights.node2, tape.concat(nv2));

  return EncodedGraph{std::move(e2), v2};
}

}  // namespace ptnet
