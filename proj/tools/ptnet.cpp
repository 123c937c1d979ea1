// Command-line surface: dataset generation, training, evaluation, feasibility
// auditing, the sample-efficiency sweep, and SVG plot emission.
//
// Exit codes: 0 success, 2 usage or file error, 3 numeric failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptnet/metrics.hpp"
#include "ptnet/model.hpp"
#include "ptnet/scenario.hpp"
#include "ptnet/svg.hpp"
#include "ptnet/trainer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace ptnet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PTNET_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env) return v;
  }
  return 7;
}

struct ModelFlags {
  int modes = 1;
  int hidden = 64;
  bool ablation = false;
  std::uint64_t init_seed = 1;

  ModelConfig to_config() const {
    ModelConfig cfg;
    cfg.predictor.num_modes = modes;
    cfg.predictor.hidden = hidden;
    cfg.encoder.hidden = hidden;
    cfg.encoder.embed = hidden;
    cfg.ablation = ablation;
    cfg.init_seed = init_seed;
    return cfg;
  }
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
  cmd->add_option("--modes", flags.modes, "temporal modes per goal (N)");
  cmd->add_option("--hidden", flags.hidden, "MLP hidden/embedding width");
  cmd->add_flag("--ablation", flags.ablation,
                "direct waypoint regression instead of the tracking layer");
}

void load_train_config_file(const std::string& path, TrainConfig& tc,
                            ModelFlags& mf) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed config json", 1);
  if (j.contains("seed")) tc.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("epochs")) tc.epochs = j["epochs"].get<int>();
  if (j.contains("lr")) tc.lr = j["lr"].get<double>();
  if (j.contains("batch")) tc.batch = j["batch"].get<int>();
  if (j.contains("modes")) mf.modes = j["modes"].get<int>();
  if (j.contains("hidden")) mf.hidden = j["hidden"].get<int>();
  if (j.contains("ablation")) mf.ablation = j["ablation"].get<bool>();
}

std::vector<Scenario> load_scenarios(const std::string& path) {
  GenWarnings warnings;
  std::vector<Scenario> s = read_scenarios(path, &warnings);
  for (const std::string& w : warnings.messages)
    std::cerr << "warning: " << w << "\n";
  return s;
}

// ---- gen-data ----

int run_gen_data(std::uint64_t seed, const std::string& kinds_csv, int count,
                 int actors, const std::string& out_dir) {
  std::vector<MapKind> kinds;
  std::stringstream ss(kinds_csv);
  std::string item;
  while (std::getline(ss, item, ',')) kinds.push_back(map_kind_from_string(item));
  if (kinds.empty()) throw Error("no map kinds given");

  fs::create_directories(out_dir);
  std::vector<Scenario> train, val, test;
  GenWarnings warnings;
  for (int i = 0; i < count; ++i) {
    const MapKind kind = kinds[static_cast<size_t>(i) % kinds.size()];
    const std::string id = "s" + std::to_string(seed) + "-" + std::to_string(i);
    Scenario sc = generate_scenario(seed + static_cast<std::uint64_t>(i) * 1000,
                                    kind, id, actors, &warnings);
    if (sc.actors.empty()) continue;
    const std::string split = split_of(id);
    (split == "train" ? train : split == "val" ? val : test)
        .push_back(std::move(sc));
  }
  for (const std::string& w : warnings.messages)
    std::cerr << "warning: " << w << "\n";
  write_scenarios(out_dir + "/train.jsonl", train);
  write_scenarios(out_dir + "/val.jsonl", val);
  write_scenarios(out_dir + "/test.jsonl", test);
  std::cout << "wrote " << train.size() << " train, " << val.size()
            << " val, " << test.size() << " test scenarios to " << out_dir
            << "\n";
  return kExitOk;
}

// ---- train ----

int run_train(const std::string& data, const std::string& config_path,
              const std::string& out_dir, TrainConfig tc, ModelFlags mf) {
  if (!config_path.empty()) load_train_config_file(config_path, tc, mf);
  const std::vector<Scenario> scenarios = load_scenarios(data);
  fs::create_directories(out_dir);

  Model model(mf.to_config());
  tc.checkpoint_path = out_dir + "/checkpoint.ckpt";
  const TrainResult result = train(model, scenarios, tc);

  std::ofstream loss_csv(out_dir + "/loss.csv");
  if (!loss_csv) throw Error("cannot write loss.csv");
  loss_csv << "epoch,loss\n";
  for (size_t e = 0; e < result.epoch_losses.size(); ++e)
    loss_csv << (e + 1) << "," << result.epoch_losses[e] << "\n";

  std::cout << "trained " << tc.epochs << " epochs; final loss "
            << result.epoch_losses.back() << "; checkpoint "
            << tc.checkpoint_path << "\n";
  return kExitOk;
}

// ---- eval ----

int run_eval(const std::string& data, const std::string& checkpoint,
             const std::string& out_dir, ModelFlags mf) {
  const std::vector<Scenario> scenarios = load_scenarios(data);
  Model model(mf.to_config());
  model.load(checkpoint);
  fs::create_directories(out_dir);

  const EvalSummary summary = evaluate(model, scenarios);
  summary.save(out_dir + "/summary.json");

  std::ofstream csv(out_dir + "/metrics.csv");
  if (!csv) throw Error("cannot write metrics.csv");
  csv << "metric,value\n";
  csv << "avg_de," << summary.avg_de << "\n";
  csv << "avg_ate," << summary.avg_ate << "\n";
  csv << "avg_cte," << summary.avg_cte << "\n";
  csv << "best_avg_de," << summary.best_avg_de << "\n";
  csv << "best_avg_ate," << summary.best_avg_ate << "\n";
  csv << "best_avg_cte," << summary.best_avg_cte << "\n";
  csv << "frac_curvature," << summary.frac_curvature << "\n";
  csv << "frac_lateral_speed," << summary.frac_lateral_speed << "\n";
  csv << "frac_centripetal," << summary.frac_centripetal << "\n";
  csv << "frac_min_traversal," << summary.frac_min_traversal << "\n";
  csv << "frac_max_traversal," << summary.frac_max_traversal << "\n";
  std::cout << "evaluated " << summary.actor_count << " actors; avg DE "
            << summary.avg_de << " m; best-match avg DE " << summary.best_avg_de
            << " m\n";
  return kExitOk;
}

// ---- audit ----

struct AuditEntry {
  MetricInput input;
  bool has_gt = false;
  Trajectory gt{0.1, {TrajectoryState{}}};
};

Trajectory trajectory_from_json(const json& tj, long line, bool* has_heading) {
  std::vector<TrajectoryState> states;
  bool headings = true;
  for (const json& sj : tj.at("states")) {
    if (!sj.is_array() || (sj.size() != 2 && sj.size() != 4))
      throw ParseError("state must be [x, y] or [x, y, heading, speed]", line);
    if (sj.size() == 2) {
      headings = false;
      states.push_back(TrajectoryState{
          Vec2(sj[0].get<double>(), sj[1].get<double>()), 0.0, 0.0});
    } else {
      states.push_back(TrajectoryState{
          Vec2(sj[0].get<double>(), sj[1].get<double>()), sj[2].get<double>(),
          sj[3].get<double>()});
    }
  }
  if (has_heading) *has_heading = headings;
  return Trajectory(tj.at("dt").get<double>(), std::move(states));
}

int run_audit(const std::string& traj_path, const std::string& report_path) {
  std::ifstream in(traj_path);
  if (!in) throw Error("cannot read " + traj_path);
  std::vector<AuditEntry> entries;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed trajectory json", line_no);
    try {
      if (!j.contains("version") || j["version"].get<int>() != 1)
        throw Error("unsupported or missing format version");
      AuditEntry e;
      bool has_heading = true;
      e.input.trajectory = trajectory_from_json(j, line_no, &has_heading);
      e.input.has_heading = has_heading;
      if (j.contains("ground_truth")) {
        e.gt = trajectory_from_json(j.at("ground_truth"), line_no, nullptr);
        e.has_gt = true;
      }
      entries.push_back(std::move(e));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ParseError(ex.what(), line_no);
    }
  }

  std::vector<MetricInput> inputs;
  for (const AuditEntry& e : entries) inputs.push_back(e.input);
  const MetricConfig cfg;
  const FeasibilityReport rep = feasibility_report(inputs, cfg);

  std::ofstream csv(report_path);
  if (!csv) throw Error("cannot write " + report_path);
  csv << "metric,threshold,violation_fraction,count\n";
  csv << "curvature," << cfg.max_curvature << "," << rep.frac_curvature << ","
      << rep.count << "\n";
  csv << "lateral_speed," << cfg.max_lateral_speed << ","
      << rep.frac_lateral_speed << "," << rep.count << "\n";
  csv << "centripetal_accel," << cfg.max_centripetal_accel << ","
      << rep.frac_centripetal << "," << rep.count << "\n";
  csv << "min_traversal_accel," << cfg.min_traversal_accel << ","
      << rep.frac_min_traversal << "," << rep.count << "\n";
  csv << "max_traversal_accel," << cfg.max_traversal_accel << ","
      << rep.frac_max_traversal << "," << rep.count << "\n";

  int n_gt = 0;
  double de = 0.0, ate = 0.0, cte = 0.0;
  for (const AuditEntry& e : entries) {
    if (!e.has_gt) continue;
    const ErrorMetrics em = error_metrics(e.input.trajectory, e.gt);
    de += em.avg_de;
    ate += em.avg_ate;
    cte += em.avg_cte;
    ++n_gt;
  }
  if (n_gt > 0) {
    csv << "avg_de,," << de / n_gt << "," << n_gt << "\n";
    csv << "avg_ate,," << ate / n_gt << "," << n_gt << "\n";
    csv << "avg_cte,," << cte / n_gt << "," << n_gt << "\n";
  }
  bool substituted = false;
  for (const auto& f : rep.per_trajectory)
    substituted = substituted || f.used_motion_heading;
  if (substituted)
    std::cerr << "note: some trajectories had no heading; motion heading "
                 "substituted\n";
  std::cout << "audited " << rep.count << " trajectories -> " << report_path
            << "\n";
  return kExitOk;
}

// ---- sweep ----

int run_sweep(const std::string& train_path, const std::string& test_path,
              const std::string& out_dir, const std::string& fractions_csv,
              int seeds, TrainConfig tc, ModelFlags mf) {
  const std::vector<Scenario> train_set = load_scenarios(train_path);
  const std::vector<Scenario> test_set = load_scenarios(test_path);
  std::vector<double> fractions;
  std::stringstream ss(fractions_csv);
  std::string item;
  while (std::getline(ss, item, ','))
    fractions.push_back(std::stod(item) / 100.0);

  const SweepResult result = sample_efficiency_sweep(
      train_set, test_set, fractions, seeds, tc, mf.to_config());
  fs::create_directories(out_dir);
  result.save(out_dir + "/sweep.json");

  std::ofstream csv(out_dir + "/sweep.csv");
  if (!csv) throw Error("cannot write sweep.csv");
  csv << "fraction,tracker_mean_de,regression_mean_de\n";
  for (size_t i = 0; i < result.fractions.size(); ++i)
    csv << result.fractions[i] * 100.0 << "," << result.tracker_mean[i] << ","
        << result.regression_mean[i] << "\n";
  std::cout << "sweep complete -> " << out_dir << "/sweep.json\n";
  return kExitOk;
}

// ---- plot ----

int run_plot(const std::string& summary_path, const std::string& sweep_path,
             const std::string& data_path, const std::string& checkpoint,
             int overlays, const std::string& out_dir, ModelFlags mf) {
  fs::create_directories(out_dir);
  bool did_anything = false;
  if (!summary_path.empty()) {
    plot_horizon_curves(EvalSummary::from_json_file(summary_path),
                        out_dir + "/horizon_errors.svg");
    std::cout << "wrote " << out_dir << "/horizon_errors.svg\n";
    did_anything = true;
  }
  if (!sweep_path.empty()) {
    plot_sweep(SweepResult::from_json_file(sweep_path),
               out_dir + "/sample_efficiency.svg");
    std::cout << "wrote " << out_dir << "/sample_efficiency.svg\n";
    did_anything = true;
  }
  if (!data_path.empty()) {
    if (checkpoint.empty())
      throw Error("--data overlays need --checkpoint");
    const std::vector<Scenario> scenarios = load_scenarios(data_path);
    Model model(mf.to_config());
    model.load(checkpoint);
    const int n = std::min<int>(overlays, static_cast<int>(scenarios.size()));
    for (int i = 0; i < n; ++i) {
      const Scenario& sc = scenarios[static_cast<size_t>(i)];
      if (sc.actors.empty()) continue;
      const ModeSet modes = model.predict(sc.map, sc.actors[0]);
      plot_scenario_overlay(sc, 0, modes,
                            out_dir + "/overlay_" + std::to_string(i) + ".svg");
    }
    std::cout << "wrote " << n << " overlays to " << out_dir << "\n";
    did_anything = true;
  }
  if (!did_anything)
    throw Error("nothing to plot: pass --eval-summary, --sweep, or --data");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"goal-conditioned trajectory prediction with a differentiable "
               "path-tracking layer"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate synthetic scenario sets");
  std::uint64_t gen_seed = default_seed();
  std::string gen_kinds = "straight,curve,fork,merge,grid";
  int gen_count = 100;
  int gen_actors = 2;
  std::string gen_out = "data";
  gen->add_option("--seed", gen_seed, "master seed");
  gen->add_option("--kinds", gen_kinds, "comma-separated map kinds");
  gen->add_option("--count", gen_count, "number of scenarios");
  gen->add_option("--actors", gen_actors, "actors per scenario");
  gen->add_option("--out", gen_out, "output directory")->required();

  // train
  auto* tr = app.add_subcommand("train", "train a model");
  std::string tr_data, tr_config, tr_out = "run";
  TrainConfig tr_cfg;
  tr_cfg.seed = default_seed();
  ModelFlags tr_flags;
  tr->add_option("--data", tr_data, "training scenario file")->required();
  tr->add_option("--config", tr_config, "json training config");
  tr->add_option("--out", tr_out, "output directory")->required();
  tr->add_option("--epochs", tr_cfg.epochs, "training epochs");
  tr->add_option("--lr", tr_cfg.lr, "learning rate");
  tr->add_option("--batch", tr_cfg.batch, "actors per optimizer step");
  tr->add_option("--seed", tr_cfg.seed, "training seed");
  add_model_flags(tr, tr_flags);

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string ev_data, ev_ckpt, ev_out = "eval";
  ModelFlags ev_flags;
  ev->add_option("--data", ev_data, "scenario file")->required();
  ev->add_option("--checkpoint", ev_ckpt, "model checkpoint")->required();
  ev->add_option("--out", ev_out, "output directory")->required();
  add_model_flags(ev, ev_flags);

  // audit
  auto* au = app.add_subcommand("audit", "feasibility/error audit of a "
                                         "trajectory file");
  std::string au_traj, au_report = "report.csv";
  au->add_option("--trajectories", au_traj, "trajectory jsonl file")->required();
  au->add_option("--report", au_report, "output csv")->required();

  // sweep
  auto* sw = app.add_subcommand("sweep", "sample-efficiency sweep");
  std::string sw_train, sw_test, sw_out = "sweep";
  std::string sw_fractions = "12.5,25,50,100";
  int sw_seeds = 4;
  TrainConfig sw_cfg;
  sw_cfg.seed = default_seed();
  ModelFlags sw_flags;
  sw->add_option("--data", sw_train, "training scenario file")->required();
  sw->add_option("--test", sw_test, "test scenario file")->required();
  sw->add_option("--out", sw_out, "output directory")->required();
  sw->add_option("--fractions", sw_fractions, "percentages, comma separated");
  sw->add_option("--seeds", sw_seeds, "subsampling seeds per fraction");
  sw->add_option("--epochs", sw_cfg.epochs, "training epochs per run");
  sw->add_option("--lr", sw_cfg.lr, "learning rate");
  sw->add_option("--batch", sw_cfg.batch, "actors per optimizer step");
  sw->add_option("--seed", sw_cfg.seed, "training seed");
  add_model_flags(sw, sw_flags);

  // plot
  auto* pl = app.add_subcommand("plot", "emit svg plots");
  std::string pl_summary, pl_sweep, pl_data, pl_ckpt, pl_out = "plots";
  int pl_overlays = 4;
  ModelFlags pl_flags;
  pl->add_option("--eval-summary", pl_summary, "summary.json from eval");
  pl->add_option("--sweep", pl_sweep, "sweep.json from sweep");
  pl->add_option("--data", pl_data, "scenario file for overlays");
  pl->add_option("--checkpoint", pl_ckpt, "checkpoint for overlays");
  pl->add_option("--overlays", pl_overlays, "number of overlay plots");
  pl->add_option("--out", pl_out, "output directory")->required();
  add_model_flags(pl, pl_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed())
      return run_gen_data(gen_seed, gen_kinds, gen_count, gen_actors, gen_out);
    if (tr->parsed())
      return run_train(tr_data, tr_config, tr_out, tr_cfg, tr_flags);
    if (ev->parsed()) return run_eval(ev_data, ev_ckpt, ev_out, ev_flags);
    if (au->parsed()) return run_audit(au_traj, au_report);
    if (sw->parsed())
      return run_sweep(sw_train, sw_test, sw_out, sw_fractions, sw_seeds,
                       sw_cfg, sw_flags);
    if (pl->parsed())
      return run_plot(pl_summary, pl_sweep, pl_data, pl_ckpt, pl_overlays,
                      pl_out, pl_flags);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
