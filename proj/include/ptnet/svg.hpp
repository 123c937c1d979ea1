#pragma once

#include <string>
#include <vector>

#include "ptnet/predictor.hpp"
#include "ptnet/scenario.hpp"
#include "ptnet/trainer.hpp"

namespace ptnet {

/// Minimal deterministic SVG emitter: fixed float formatting, no timestamps,
/// so identical inputs produce identical bytes.
class SvgCanvas {
 public:
  SvgCanvas(double width, double height);

  void polyline(const std::vector<Vec2>& pts, const std::string& color,
                double stroke_width, bool dashed = false);
  void circle(const Vec2& center, double r, const std::string& color);
  void text(const Vec2& pos, const std::string& s, int font_size = 12,
            const std::string& color = "#333333");
  void line(const Vec2& a, const Vec2& b, const std::string& color,
            double stroke_width);

  std::string finish() const;
  void save(const std::string& path) const;

 private:
  double width_, height_;
  std::string body_;
};

/// Best-match error against prediction horizon (1..6 s), one curve per metric.
void plot_horizon_curves(const EvalSummary& summary, const std::string& path);

/// Best-match displacement error against training-set fraction for the
/// tracker model and the regression baseline.
void plot_sweep(const SweepResult& sweep, const std::string& path);

/// Map, ground truth, and predicted modes for one actor of one scenario.
void plot_scenario_overlay(const Scenario& scenario, int actor_idx,
                           const ModeSet& modes_actor_frame,
                           const std::string& path);

}  // namespace ptnet
