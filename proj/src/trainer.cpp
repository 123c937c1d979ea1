#include "ptnet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include <json.hpp>

#include "ptnet/kernels.hpp"

namespace ptnet {

using json = nlohmann::json;

AdamOptimizer::AdamOptimizer(ad::ParameterStore& store, const TrainConfig& cfg)
    : params_(store.all()), lr_(cfg.lr), beta1_(cfg.beta1), beta2_(cfg.beta2),
      eps_(cfg.adam_eps) {
  for (ad::Parameter* p : params_) {
    m_.emplace_back(static_cast<size_t>(p->size()), 0.0);
    v_.emplace_back(static_cast<size_t>(p->size()), 0.0);
  }
}

void AdamOptimizer::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t i = 0; i < params_.size(); ++i) {
    ad::Parameter& p = *params_[i];
    for (int k = 0; k < p.size(); ++k) {
      const double g = p.grad[static_cast<size_t>(k)];
      double& m = m_[i][static_cast<size_t>(k)];
      double& v = v_[i][static_cast<size_t>(k)];
      m = beta1_ * m + (1.0 - beta1_) * g;
      v = beta2_ * v + (1.0 - beta2_) * g * g;
      p.value[static_cast<size_t>(k)] -=
          lr_ * (m / bc1) / (std::sqrt(v / bc2) + eps_);
    }
  }
}

TrainResult train(Model& model, const std::vector<Scenario>& scenarios,
                  const TrainConfig& cfg) {
  cfg.validate();
  if (scenarios.empty()) throw Error("empty training set");

  std::vector<std::pair<int, int>> examples;  // (scenario, actor)
  for (int s = 0; s < static_cast<int>(scenarios.size()); ++s)
    for (int a = 0; a < static_cast<int>(scenarios[static_cast<size_t>(s)]
                                             .actors.size());
         ++a)
      examples.emplace_back(s, a);
  if (examples.empty()) throw Error("training set has no actors");

  std::mt19937_64 rng(cfg.seed);
  AdamOptimizer opt(model.params(), cfg);
  TrainResult result;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(examples.begin(), examples.end(), rng);
    double epoch_loss = 0.0;
    size_t i = 0;
    while (i < examples.size()) {
      const size_t batch_end = std::min(i + static_cast<size_t>(cfg.batch),
                                        examples.size());
      const double batch_n = static_cast<double>(batch_end - i);
      model.params().zero_grads();
      for (; i < batch_end; ++i) {
        const auto& [s, a] = examples[i];
        const Scenario& scenario = scenarios[static_cast<size_t>(s)];
        ad::Tape tape;
        ad::Var loss;
        try {
          loss = model.training_loss(tape, scenario.map,
                                     scenario.actors[static_cast<size_t>(a)],
                                     scenario.ground_truth[static_cast<size_t>(a)]);
        } catch (const NumericError& e) {
          throw NumericError(std::string(e.what()) + " (scenario " +
                             scenario.id + ")");
        }
        if (!std::isfinite(loss.value()))
          throw NumericError("non-finite loss (scenario " + scenario.id + ")");
        epoch_loss += loss.value();
        tape.backward(loss);
        tape.accumulate_param_grads();
      }
      // Mean over the batch: scale the accumulated gradients.
      for (ad::Parameter* p : model.params().all())
        kernels::scale(1.0 / batch_n, p->grad.data(),
                       static_cast<size_t>(p->size()));
      opt.step();
    }
    result.epoch_losses.push_back(epoch_loss /
                                  static_cast<double>(examples.size()));
    if (!cfg.checkpoint_path.empty()) model.save(cfg.checkpoint_path);
  }
  return result;
}

namespace {

struct ActorEval {
  ErrorMetrics most_probable;
  ErrorMetrics best_match;
  std::array<double, 6> horizon_ate{};
  std::array<double, 6> horizon_cte{};
};

ActorEval evaluate_actor(const ModeSet& modes, const Trajectory& gt_world,
                         const Pose& actor_pose) {
  if (modes.modes.empty()) throw Error("no predicted modes");
  ActorEval out;

  int most_probable = 0;
  for (int i = 1; i < static_cast<int>(modes.modes.size()); ++i)
    if (modes.modes[static_cast<size_t>(i)].probability >
        modes.modes[static_cast<size_t>(most_probable)].probability)
      most_probable = i;

  std::vector<Trajectory> world;
  world.reserve(modes.modes.size());
  for (const Mode& m : modes.modes)
    world.push_back(to_world_frame(m.trajectory, actor_pose));

  int best = 0;
  double best_de = std::numeric_limits<double>::infinity();
  std::vector<ErrorMetrics> per_mode(world.size());
  for (int i = 0; i < static_cast<int>(world.size()); ++i) {
    per_mode[static_cast<size_t>(i)] =
        error_metrics(world[static_cast<size_t>(i)], gt_world);
    if (per_mode[static_cast<size_t>(i)].avg_de < best_de) {
      best_de = per_mode[static_cast<size_t>(i)].avg_de;
      best = i;
    }
  }
  out.most_probable = per_mode[static_cast<size_t>(most_probable)];
  out.best_match = per_mode[static_cast<size_t>(best)];

  // Per-horizon decomposition of the best-match mode at 1..6 s.
  const Trajectory& bm = world[static_cast<size_t>(best)];
  const int T = gt_world.size();
  std::vector<Vec2> gt_pts;
  for (const TrajectoryState& s : gt_world.states) gt_pts.push_back(s.position);
  double motion = 0.0;
  for (size_t k = 0; k + 1 < gt_pts.size(); ++k)
    motion += (gt_pts[k + 1] - gt_pts[k]).norm();
  const bool degenerate = motion < 0.1;
  Polyline gt_path = degenerate
                         ? Polyline({gt_pts.front(),
                                     gt_pts.front() + Vec2{0.0, 1.0}})
                         : resample_polyline(Polyline(gt_pts), 0.1);
  for (int h = 1; h <= 6; ++h) {
    const int idx = std::min(T, static_cast<int>(std::lround(
                                    h / gt_world.dt))) - 1;
    if (idx < 0) continue;
    if (degenerate) {
      const double de = (bm.states[static_cast<size_t>(idx)].position -
                         gt_world.states[static_cast<size_t>(idx)].position)
                            .norm();
      out.horizon_ate[static_cast<size_t>(h - 1)] = de;
      out.horizon_cte[static_cast<size_t>(h - 1)] = 0.0;
      continue;
    }
    const Projection pp =
        project_point(bm.states[static_cast<size_t>(idx)].position, gt_path);
    const Projection pg = project_point(
        gt_world.states[static_cast<size_t>(idx)].position, gt_path);
    out.horizon_ate[static_cast<size_t>(h - 1)] =
        std::abs(pp.arclength - pg.arclength);
    out.horizon_cte[static_cast<size_t>(h - 1)] = std::abs(pp.lateral);
  }
  return out;
}

}  // namespace

EvalSummary evaluate_with(const PredictFn& predict,
                          const std::vector<Scenario>& scenarios,
                          bool modes_have_heading) {
  EvalSummary sum;
  std::vector<MetricInput> all_modes;
  for (const Scenario& sc : scenarios) {
    for (int a = 0; a < static_cast<int>(sc.actors.size()); ++a) {
      const ModeSet modes = predict(sc, a);
      const ActorEval ae =
          evaluate_actor(modes, sc.ground_truth[static_cast<size_t>(a)],
                         sc.actors[static_cast<size_t>(a)].pose);
      sum.avg_de += ae.most_probable.avg_de;
      sum.avg_ate += ae.most_probable.avg_ate;
      sum.avg_cte += ae.most_probable.avg_cte;
      sum.best_avg_de += ae.best_match.avg_de;
      sum.best_avg_ate += ae.best_match.avg_ate;
      sum.best_avg_cte += ae.best_match.avg_cte;
      for (int h = 0; h < 6; ++h) {
        sum.horizon_ate[static_cast<size_t>(h)] +=
            ae.horizon_ate[static_cast<size_t>(h)];
        sum.horizon_cte[static_cast<size_t>(h)] +=
            ae.horizon_cte[static_cast<size_t>(h)];
      }
      for (const Mode& m : modes.modes)
        all_modes.push_back(MetricInput{m.trajectory, modes_have_heading});
      ++sum.actor_count;
    }
  }
  if (sum.actor_count == 0) throw Error("no actors to evaluate");
  const double n = sum.actor_count;
  sum.avg_de /= n;
  sum.avg_ate /= n;
  sum.avg_cte /= n;
  sum.best_avg_de /= n;
  sum.best_avg_ate /= n;
  sum.best_avg_cte /= n;
  for (int h = 0; h < 6; ++h) {
    sum.horizon_ate[static_cast<size_t>(h)] /= n;
    sum.horizon_cte[static_cast<size_t>(h)] /= n;
  }
  const FeasibilityReport rep = feasibility_report(all_modes, MetricConfig{});
  sum.frac_curvature = rep.frac_curvature;
  sum.frac_lateral_speed = rep.frac_lateral_speed;
  sum.frac_centripetal = rep.frac_centripetal;
  sum.frac_min_traversal = rep.frac_min_traversal;
  sum.frac_max_traversal = rep.frac_max_traversal;
  sum.mode_count = static_cast<int>(all_modes.size());
  return sum;
}

EvalSummary evaluate(Model& model, const std::vector<Scenario>& scenarios) {
  return evaluate_with(
      [&model](const Scenario& sc, int a) {
        return model.predict(sc.map, sc.actors[static_cast<size_t>(a)]);
      },
      scenarios, /*modes_have_heading=*/!model.is_ablation());
}

namespace {

json summary_to_json(const EvalSummary& s) {
  json j;
  j["avg_de"] = s.avg_de;
  j["avg_ate"] = s.avg_ate;
  j["avg_cte"] = s.avg_cte;
  j["best_avg_de"] = s.best_avg_de;
  j["best_avg_ate"] = s.best_avg_ate;
  j["best_avg_cte"] = s.best_avg_cte;
  j["horizon_ate"] = s.horizon_ate;
  j["horizon_cte"] = s.horizon_cte;
  j["frac_curvature"] = s.frac_curvature;
  j["frac_lateral_speed"] = s.frac_lateral_speed;
  j["frac_centripetal"] = s.frac_centripetal;
  j["frac_min_traversal"] = s.frac_min_traversal;
  j["frac_max_traversal"] = s.frac_max_traversal;
  j["actor_count"] = s.actor_count;
  j["mode_count"] = s.mode_count;
  j["dataset_fraction"] = s.dataset_fraction;
  return j;
}

}  // namespace

std::string EvalSummary::to_json() const { return summary_to_json(*this).dump(2); }

void EvalSummary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << to_json() << "\n";
}

EvalSummary EvalSummary::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed eval summary", 1);
  EvalSummary s;
  s.avg_de = j.at("avg_de").get<double>();
  s.avg_ate = j.at("avg_ate").get<double>();
  s.avg_cte = j.at("avg_cte").get<double>();
  s.best_avg_de = j.at("best_avg_de").get<double>();
  s.best_avg_ate = j.at("best_avg_ate").get<double>();
  s.best_avg_cte = j.at("best_avg_cte").get<double>();
  for (int h = 0; h < 6; ++h) {
    s.horizon_ate[static_cast<size_t>(h)] = j.at("horizon_ate")[h].get<double>();
    s.horizon_cte[static_cast<size_t>(h)] = j.at("horizon_cte")[h].get<double>();
  }
  s.frac_curvature = j.at("frac_curvature").get<double>();
  s.frac_lateral_speed = j.at("frac_lateral_speed").get<double>();
  s.frac_centripetal = j.at("frac_centripetal").get<double>();
  s.frac_min_traversal = j.at("frac_min_traversal").get<double>();
  s.frac_max_traversal = j.at("frac_max_traversal").get<double>();
  s.actor_count = j.at("actor_count").get<int>();
  s.mode_count = j.at("mode_count").get<int>();
  s.dataset_fraction = j.at("dataset_fraction").get<double>();
  return s;
}

SweepResult sample_efficiency_sweep(const std::vector<Scenario>& train_set,
                                    const std::vector<Scenario>& test_set,
                                    const std::vector<double>& fractions,
                                    int n_seeds, const TrainConfig& train_cfg,
                                    const ModelConfig& base_cfg) {
  SweepResult out;
  out.fractions = fractions;
  out.seeds = n_seeds;
  out.tracker_de.assign(fractions.size(), {});
  out.regression_de.assign(fractions.size(), {});

  for (size_t fi = 0; fi < fractions.size(); ++fi) {
    const double fraction = fractions[fi];
    if (fraction <= 0.0 || fraction > 1.0)
      throw Error("fractions must lie in (0, 1]");
    for (int seed = 0; seed < n_seeds; ++seed) {
      std::vector<Scenario> subset;
      for (const Scenario& s : train_set)
        if (fraction >= 1.0 ||
            in_fraction(s.id, static_cast<std::uint64_t>(seed) + 1, fraction))
          subset.push_back(s);
      if (subset.empty()) subset.push_back(train_set.front());

      for (bool ablation : {false, true}) {
        ModelConfig cfg = base_cfg;
        cfg.ablation = ablation;
        Model model(cfg);
        TrainConfig tc = train_cfg;
        tc.checkpoint_path.clear();
        train(model, subset, tc);
        const EvalSummary es = evaluate(model, test_set);
        (ablation ? out.regression_de : out.tracker_de)[fi].push_back(
            es.best_avg_de);
      }
    }
  }
  for (size_t fi = 0; fi < fractions.size(); ++fi) {
    auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };
    out.tracker_mean.push_back(mean(out.tracker_de[fi]));
    out.regression_mean.push_back(mean(out.regression_de[fi]));
  }
  return out;
}

std::string SweepResult::to_json() const {
  json j;
  j["fractions"] = fractions;
  j["seeds"] = seeds;
  j["tracker_de"] = tracker_de;
  j["regression_de"] = regression_de;
  j["tracker_mean"] = tracker_mean;
  j["regression_mean"] = regression_mean;
  return j.dump(2);
}

void SweepResult::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << to_json() << "\n";
}

SweepResult SweepResult::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed sweep result", 1);
  SweepResult s;
  s.fractions = j.at("fractions").get<std::vector<double>>();
  s.seeds = j.at("seeds").get<int>();
  s.tracker_de = j.at("tracker_de").get<std::vector<std::vector<double>>>();
  s.regression_de =
      j.at("regression_de").get<std::vector<std::vector<double>>>();
  s.tracker_mean = j.at("tracker_mean").get<std::vector<double>>();
  s.regression_mean = j.at("regression_mean").get<std::vector<double>>();
  return s;
}

}  // namespace ptnet
