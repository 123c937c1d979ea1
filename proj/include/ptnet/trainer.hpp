#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ptnet/metrics.hpp"
#include "ptnet/model.hpp"

namespace ptnet {

struct TrainConfig {
  std::uint64_t seed = 7;
  int epochs = 50;
  double lr = 1e-3;
  int batch = 32;               // actors per optimizer step
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::string checkpoint_path;  // when set, saved after every epoch

  void validate() const {
    if (epochs < 1 || batch < 1 || lr < 0.0)
      throw Error("invalid training config");
  }
};

/// First-order optimizer with adaptive moment estimates.
class AdamOptimizer {
 public:
  AdamOptimizer(ad::ParameterStore& store, const TrainConfig& cfg);
  void step();

 private:
  std::vector<ad::Parameter*> params_;
  std::vector<std::vector<double>> m_, v_;
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
};

struct TrainResult {
  std::vector<double> epoch_losses;  // mean per-actor loss per epoch
};

/// Mini-batch training over all actors of all scenarios. Deterministic given
/// the seed. A non-finite loss aborts with the offending scenario id.
TrainResult train(Model& model, const std::vector<Scenario>& scenarios,
                  const TrainConfig& cfg);

struct EvalSummary {
  // Most-probable mode, averaged over actors and timesteps.
  double avg_de = 0.0;
  double avg_ate = 0.0;
  double avg_cte = 0.0;
  // Best-matching mode (smallest average displacement error).
  double best_avg_de = 0.0;
  double best_avg_ate = 0.0;
  double best_avg_cte = 0.0;
  // Best-match errors at 1..6 s horizons.
  std::array<double, 6> horizon_ate{};
  std::array<double, 6> horizon_cte{};
  // Feasibility over every predicted mode of every actor.
  double frac_curvature = 0.0;
  double frac_lateral_speed = 0.0;
  double frac_centripetal = 0.0;
  double frac_min_traversal = 0.0;
  double frac_max_traversal = 0.0;
  int actor_count = 0;
  int mode_count = 0;
  double dataset_fraction = 1.0;

  std::string to_json() const;
  static EvalSummary from_json_file(const std::string& path);
  void save(const std::string& path) const;
};

/// Prediction hook: actor-frame modes for scenario actor `actor_idx`.
/// Lets tests evaluate oracle or stub predictors through the same pipeline.
using PredictFn = std::function<ModeSet(const Scenario&, int actor_idx)>;

EvalSummary evaluate_with(const PredictFn& predict,
                          const std::vector<Scenario>& scenarios,
                          bool modes_have_heading);
EvalSummary evaluate(Model& model, const std::vector<Scenario>& scenarios);

struct SweepResult {
  std::vector<double> fractions;           // of the training set, in (0, 1]
  int seeds = 0;
  // [fraction][seed] best-match average displacement errors.
  std::vector<std::vector<double>> tracker_de;
  std::vector<std::vector<double>> regression_de;
  std::vector<double> tracker_mean;
  std::vector<double> regression_mean;

  std::string to_json() const;
  static SweepResult from_json_file(const std::string& path);
  void save(const std::string& path) const;
};

/// Trains both the tracker model and the direct-regression baseline on nested
/// subsets of the training scenarios (per subsampling seed) and reports
/// best-match displacement error on the fixed test set.
SweepResult sample_efficiency_sweep(const std::vector<Scenario>& train_set,
                                    const std::vector<Scenario>& test_set,
                                    const std::vector<double>& fractions,
                                    int n_seeds, const TrainConfig& train_cfg,
                                    const ModelConfig& base_cfg);

}  // namespace ptnet
