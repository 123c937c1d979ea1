#include "ptnet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace ptnet {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

SvgCanvas::SvgCanvas(double width, double height)
    : width_(width), height_(height) {}

void SvgCanvas::polyline(const std::vector<Vec2>& pts, const std::string& color,
                         double stroke_width, bool dashed) {
  if (pts.size() < 2) return;
  body_ += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
           fmt(stroke_width) + "\"";
  if (dashed) body_ += " stroke-dasharray=\"4 3\"";
  body_ += " points=\"";
  for (size_t i = 0; i < pts.size(); ++i) {
    if (i) body_ += " ";
    body_ += fmt(pts[i].x) + "," + fmt(pts[i].y);
  }
  body_ += "\"/>\n";
}

void SvgCanvas::circle(const Vec2& center, double r, const std::string& color) {
  body_ += "<circle cx=\"" + fmt(center.x) + "\" cy=\"" + fmt(center.y) +
           "\" r=\"" + fmt(r) + "\" fill=\"" + color + "\"/>\n";
}

void SvgCanvas::text(const Vec2& pos, const std::string& s, int font_size,
                     const std::string& color) {
  body_ += "<text x=\"" + fmt(pos.x) + "\" y=\"" + fmt(pos.y) +
           "\" font-family=\"sans-serif\" font-size=\"" +
           std::to_string(font_size) + "\" fill=\"" + color + "\">" + s +
           "</text>\n";
}

void SvgCanvas::line(const Vec2& a, const Vec2& b, const std::string& color,
                     double stroke_width) {
  body_ += "<line x1=\"" + fmt(a.x) + "\" y1=\"" + fmt(a.y) + "\" x2=\"" +
           fmt(b.x) + "\" y2=\"" + fmt(b.y) + "\" stroke=\"" + color +
           "\" stroke-width=\"" + fmt(stroke_width) + "\"/>\n";
}

std::string SvgCanvas::finish() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width_) +
         "\" height=\"" + fmt(height_) + "\" viewBox=\"0 0 " + fmt(width_) +
         " " + fmt(height_) + "\">\n<rect width=\"100%\" height=\"100%\" " +
         "fill=\"white\"/>\n" + body_ + "</svg>\n";
}

void SvgCanvas::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << finish();
}

namespace {

// A simple line chart with axes, ticks, and per-series colors.
struct Chart {
  SvgCanvas canvas{640, 420};
  double x0 = 70, y0 = 360, x1 = 600, y1 = 40;  // plot area (y grows up)
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;

  Vec2 map(double x, double y) const {
    const double px = x0 + (x - xmin) / (xmax - xmin) * (x1 - x0);
    const double py = y0 - (y - ymin) / (ymax - ymin) * (y0 - y1);
    return {px, py};
  }

  void axes(const std::string& xlabel, const std::string& ylabel, int ticks) {
    canvas.line({x0, y0}, {x1, y0}, "#444444", 1.2);
    canvas.line({x0, y0}, {x0, y1}, "#444444", 1.2);
    for (int i = 0; i <= ticks; ++i) {
      const double fx = xmin + (xmax - xmin) * i / ticks;
      const double fy = ymin + (ymax - ymin) * i / ticks;
      const Vec2 px = map(fx, ymin);
      const Vec2 py = map(xmin, fy);
      canvas.line(px, px + Vec2{0, 5}, "#444444", 1.0);
      canvas.line(py, py + Vec2{-5, 0}, "#444444", 1.0);
      canvas.text(px + Vec2{-10, 20}, fmt(fx), 10);
      canvas.text(py + Vec2{-45, 4}, fmt(fy), 10);
    }
    canvas.text({(x0 + x1) / 2 - 30, y0 + 40}, xlabel, 12);
    canvas.text({12, (y0 + y1) / 2}, ylabel, 12);
  }

  void series(const std::vector<double>& xs, const std::vector<double>& ys,
              const std::string& color, const std::string& label,
              double label_slot) {
    std::vector<Vec2> pts;
    for (size_t i = 0; i < xs.size(); ++i) pts.push_back(map(xs[i], ys[i]));
    canvas.polyline(pts, color, 2.0);
    for (const Vec2& p : pts) canvas.circle(p, 3.0, color);
    canvas.text({x1 - 180, y1 + 16 * label_slot}, label, 11, color);
  }
};

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

void plot_horizon_curves(const EvalSummary& summary, const std::string& path) {
  Chart chart;
  std::vector<double> horizons{1, 2, 3, 4, 5, 6};
  std::vector<double> ate(summary.horizon_ate.begin(),
                          summary.horizon_ate.end());
  std::vector<double> cte(summary.horizon_cte.begin(),
                          summary.horizon_cte.end());
  chart.xmin = 0.0;
  chart.xmax = 6.0;
  chart.ymin = 0.0;
  chart.ymax = std::max(0.1, std::max(max_of(ate), max_of(cte)) * 1.15);
  chart.axes("horizon [s]", "error [m]", 6);
  chart.series(horizons, ate, "#c0392b", "along-track error", 1);
  chart.series(horizons, cte, "#2471a3", "cross-track error", 2);
  chart.canvas.save(path);
}

void plot_sweep(const SweepResult& sweep, const std::string& path) {
  Chart chart;
  std::vector<double> fractions;
  for (double f : sweep.fractions) fractions.push_back(f * 100.0);
  chart.xmin = 0.0;
  chart.xmax = 100.0;
  chart.ymin = 0.0;
  chart.ymax = std::max(0.1, std::max(max_of(sweep.tracker_mean),
                                      max_of(sweep.regression_mean)) * 1.15);
  chart.axes("training data [%]", "best-match avg DE [m]", 4);
  chart.series(fractions, sweep.tracker_mean, "#1e8449", "tracker model", 1);
  chart.series(fractions, sweep.regression_mean, "#7d3c98",
               "direct regression", 2);
  chart.canvas.save(path);
}

void plot_scenario_overlay(const Scenario& scenario, int actor_idx,
                           const ModeSet& modes_actor_frame,
                           const std::string& path) {
  const ActorState& actor = scenario.actors[static_cast<size_t>(actor_idx)];
  const Trajectory& gt = scenario.ground_truth[static_cast<size_t>(actor_idx)];

  // Gather world-frame geometry and fit it into the canvas.
  std::vector<std::vector<Vec2>> lanes;
  for (const Lane& l : scenario.map.lanes()) lanes.push_back(l.centerline.points());
  std::vector<Vec2> gt_pts;
  for (const TrajectoryState& s : gt.states) gt_pts.push_back(s.position);
  std::vector<std::vector<Vec2>> modes;
  for (const Mode& m : modes_actor_frame.modes) {
    std::vector<Vec2> pts{actor.pose.position};
    for (const TrajectoryState& s :
         to_world_frame(m.trajectory, actor.pose).states)
      pts.push_back(s.position);
    modes.push_back(std::move(pts));
  }

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  auto grow = [&](const std::vector<Vec2>& pts) {
    for (const Vec2& p : pts) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  };
  for (const auto& l : lanes) grow(l);
  grow(gt_pts);
  for (const auto& m : modes) grow(m);
  const double margin = 8.0;
  xmin -= margin; xmax += margin; ymin -= margin; ymax += margin;

  const double size = 640.0;
  const double scale = size / std::max(xmax - xmin, ymax - ymin);
  SvgCanvas canvas(size, size);
  auto map = [&](const Vec2& p) {
    // +y up on screen.
    return Vec2{(p.x - xmin) * scale, size - (p.y - ymin) * scale};
  };
  auto map_all = [&](const std::vector<Vec2>& pts) {
    std::vector<Vec2> out;
    out.reserve(pts.size());
    for (const Vec2& p : pts) out.push_back(map(p));
    return out;
  };

  for (const auto& l : lanes) canvas.polyline(map_all(l), "#bbbbbb", 3.0);
  for (const Lane& l : scenario.map.lanes())
    for (const Sign& s : l.signs) canvas.circle(map(s.position), 4.0, "#e67e22");
  for (size_t i = 0; i < modes.size(); ++i) {
    const double p = modes_actor_frame.modes[i].probability;
    const std::string color = p >= 0.5 ? "#c0392b" : "#e59866";
    canvas.polyline(map_all(modes[i]), color, 1.8, true);
  }
  canvas.polyline(map_all(gt_pts), "#1e8449", 2.2);
  canvas.circle(map(actor.pose.position), 5.0, "#2c3e50");
  canvas.text({10, 20}, "scenario " + scenario.id, 12);
  canvas.save(path);
}

}  // namespace ptnet
