#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "io.hpp"

namespace alsm {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Maps a data interval onto pixel coordinates (y axes pass px0 > px1 so
// larger values draw higher up).
struct AxisMap {
  double lo = 0.0, hi = 1.0, px0 = 0.0, px1 = 1.0;
  double operator()(double v) const {
    if (hi == lo) return 0.5 * (px0 + px1);
    return px0 + (v - lo) / (hi - lo) * (px1 - px0);
  }
};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Range padded(double frac) const {
    const double pad = (hi > lo ? hi - lo : std::max(std::abs(hi), 1.0)) * frac;
    return Range{lo - pad, hi + pad};
  }
};

class Svg {
 public:
  Svg(int width, int height) : width_(width), height_(height) {
    body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
             "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
             std::to_string(width) + " " + std::to_string(height) + "\">\n";
    body_ += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" +
             std::to_string(height) + "\" fill=\"#ffffff\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double stroke_width = 1.0, const std::string& extra = "") {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
             num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(stroke_width) + "\"" +
             (extra.empty() ? "" : " " + extra) + "/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
             "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& fill, double opacity = 1.0) {
    body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
             "\" fill=\"" + fill + "\" fill-opacity=\"" + num(opacity) + "\"/>\n";
  }

  void text(double x, double y, const std::string& content, int size = 12,
            const std::string& anchor = "start", const std::string& fill = "#333333") {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\"" +
             " font-size=\"" + std::to_string(size) + "\" text-anchor=\"" + anchor +
             "\" fill=\"" + fill + "\">" + escape_xml(content) + "</text>\n";
  }

  void raw(const std::string& fragment) { body_ += fragment; }

  void save(const std::string& path) {
    body_ += "</svg>\n";
    write_text_file(path, body_);
  }

  int width() const { return width_; }
  int height() const { return height_; }

 private:
  int width_, height_;
  std::string body_;
};

void draw_frame(Svg& svg, const AxisMap& x, const AxisMap& y, const std::string& x_label,
                const std::string& y_label) {
  const std::string axis = "#444444";
  svg.line(x.px0, y.px0, x.px1, y.px0, axis);  // x axis (bottom)
  svg.line(x.px0, y.px0, x.px0, y.px1, axis);  // y axis (left)
  for (const double t : {0.0, 0.5, 1.0}) {
    const double xv = x.lo + t * (x.hi - x.lo);
    const double yv = y.lo + t * (y.hi - y.lo);
    svg.line(x(xv), y.px0, x(xv), y.px0 + 4, axis);
    svg.text(x(xv), y.px0 + 18, label(xv), 11, "middle");
    svg.line(x.px0 - 4, y(yv), x.px0, y(yv), axis);
    svg.text(x.px0 - 7, y(yv) + 4, label(yv), 11, "end");
  }
  svg.text(0.5 * (x.px0 + x.px1), y.px0 + 34, x_label, 12, "middle");
  svg.raw("<text x=\"14\" y=\"" + num(0.5 * (y.px0 + y.px1)) +
          "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" fill=\"#333333\"" +
          " transform=\"rotate(-90 14 " + num(0.5 * (y.px0 + y.px1)) + ")\">" +
          escape_xml(y_label) + "</text>\n");
}

std::string heat_color(double t) {
  // white -> deep blue
  const auto channel = [](double from, double to, double f) {
    return static_cast<int>(std::lround(from + (to - from) * f));
  };
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", channel(252, 28, t), channel(252, 32, t),
                channel(254, 120, t));
  return buf;
}

}  // namespace

void plot_slope_vs_size(const std::string& path, const std::vector<RunRecord>& records) {
  struct Point {
    double size, slope, ratio;
  };
  std::vector<Point> pts;
  for (const auto& r : records)
    if (!r.diverged && std::isfinite(r.train_slope))
      pts.push_back({static_cast<double>(r.n_neurons + r.n_astrocytes), r.train_slope, r.ratio});
  if (pts.empty()) throw std::invalid_argument("no finite records to plot");

  Range xr, yr, rr;
  for (const auto& p : pts) {
    xr.add(p.size);
    yr.add(p.slope);
    rr.add(p.ratio);
  }
  const Range xp = xr.padded(0.06), yp = yr.padded(0.08);

  Svg svg(640, 440);
  const AxisMap x{xp.lo, xp.hi, 70, 610};
  const AxisMap y{yp.lo, yp.hi, 390, 50};
  svg.text(320, 26, "Learning-rate slope vs network size", 15, "middle", "#111111");
  draw_frame(svg, x, y, "total units (N + A)", "slope over first 10 epochs");
  if (yp.lo < 0.0 && yp.hi > 0.0)
    svg.line(x.px0, y(0.0), x.px1, y(0.0), "#bbbbbb", 1.0, "stroke-dasharray=\"4 3\"");
  for (const auto& p : pts) {
    const double t = rr.hi > rr.lo ? (p.ratio - rr.lo) / (rr.hi - rr.lo) : 0.5;
    svg.circle(x(p.size), y(p.slope), 2.5 + 5.5 * t, "#2a5db0", 0.55);
  }
  svg.text(610, 415, "marker size: A/N ratio " + label(rr.lo) + " to " + label(rr.hi), 11, "end",
           "#555555");
  svg.save(path);
}

namespace {

void reconstruction_panel(Svg& svg, const LassoResult& fit, double px0, double px1,
                          const std::string& title) {
  Range vr;
  for (Eigen::Index i = 0; i < fit.actual.size(); ++i) {
    vr.add(fit.actual[i]);
    vr.add(fit.fitted[i]);
  }
  const Range vp = vr.padded(0.08);
  const AxisMap x{vp.lo, vp.hi, px0, px1};
  const AxisMap y{vp.lo, vp.hi, 390, 70};
  svg.text(0.5 * (px0 + px1), 52, title, 13, "middle", "#111111");
  draw_frame(svg, x, y, "actual", "reconstructed");
  svg.line(x(vp.lo), y(vp.lo), x(vp.hi), y(vp.hi), "#999999", 1.0,
           "stroke-dasharray=\"5 4\"");
  for (Eigen::Index i = 0; i < fit.actual.size(); ++i)
    svg.circle(x(fit.actual[i]), y(fit.fitted[i]), 3.0, "#b03a2a", 0.6);
  svg.text(0.5 * (px0 + px1), 412, "r = " + label(fit.reconstruction_correlation), 12, "middle",
           "#555555");
}

}  // namespace

void plot_lasso_reconstruction(const std::string& path, const LassoResult& train_fit,
                               const LassoResult& val_fit) {
  if (train_fit.actual.size() == 0 || val_fit.actual.size() == 0)
    throw std::invalid_argument("empty reconstruction fit");
  Svg svg(900, 440);
  svg.text(450, 26, "Sparse-fit reconstruction of learning-rate slopes", 15, "middle", "#111111");
  reconstruction_panel(svg, train_fit, 80, 420, "training slope");
  reconstruction_panel(svg, val_fit, 520, 860, "validation slope");
  svg.save(path);
}

void plot_kde_heatmap(const std::string& path, const KdeResult& kde) {
  const Eigen::Index nr = kde.grid.ratio.size();
  const Eigen::Index ns = kde.grid.slope.size();
  if (nr < 2 || ns < 2) throw std::invalid_argument("KDE grid too small to plot");

  Svg svg(680, 480);
  const AxisMap x{kde.grid.ratio[0], kde.grid.ratio[nr - 1], 70, 620};
  const AxisMap y{kde.grid.slope[0], kde.grid.slope[ns - 1], 420, 60};
  svg.text(340, 26, "Slope density vs astrocyte-to-neuron ratio", 15, "middle", "#111111");

  const double dmax = kde.density.maxCoeff();
  // Cap the drawn cell count; SVG with every grid cell would be needlessly big.
  const auto stride = [](Eigen::Index n) {
    return std::max<Eigen::Index>(1, (n + 127) / 128);
  };
  const Eigen::Index si = stride(nr), sj = stride(ns);
  for (Eigen::Index i = 0; i < nr; i += si) {
    const Eigen::Index i_end = std::min<Eigen::Index>(i + si, nr - 1);
    for (Eigen::Index j = 0; j < ns; j += sj) {
      const Eigen::Index j_end = std::min<Eigen::Index>(j + sj, ns - 1);
      const double d = kde.density(i, j);
      const double t = dmax > 0.0 ? d / dmax : 0.0;
      if (t < 0.004) continue;  // skip near-white cells
      const double x0 = x(kde.grid.ratio[i]);
      const double x1 = i_end > i ? x(kde.grid.ratio[i_end]) : x0 + 2.0;
      const double y1 = y(kde.grid.slope[j]);
      const double y0 = j_end > j ? y(kde.grid.slope[j_end]) : y1 - 2.0;
      svg.rect(x0, y0, std::max(1.0, x1 - x0), std::max(1.0, y1 - y0), heat_color(t));
    }
  }

  draw_frame(svg, x, y, "A/N ratio", "learning-rate slope");

  if (x.lo <= 2.0 && 2.0 <= x.hi) {
    svg.raw("<line id=\"ref-ratio-2\" x1=\"" + num(x(2.0)) + "\" y1=\"" + num(y.px0) +
            "\" x2=\"" + num(x(2.0)) + "\" y2=\"" + num(y.px1) +
            "\" stroke=\"#c22a2a\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n");
    svg.text(x(2.0) + 5, y.px1 + 14, "2:1", 12, "start", "#c22a2a");
  }
  svg.raw("<circle cx=\"" + num(x(kde.mode_ratio)) + "\" cy=\"" + num(y(kde.mode_slope)) +
          "\" r=\"6\" fill=\"none\" stroke=\"#111111\" stroke-width=\"1.5\"/>\n");
  svg.text(x(kde.mode_ratio) + 9, y(kde.mode_slope) - 8,
           "mode at ratio " + label(kde.mode_ratio), 11, "start", "#111111");
  svg.save(path);
}

}  // namespace alsm
