#include "rlab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include <Eigen/Dense>

#include "rlab/error.hpp"
#include "rlab/fit.hpp"

namespace rlab {

namespace {

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 80, kRight = 610, kTop = 50, kBottom = 380;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};
constexpr int kPalette = 8;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      lo -= 0.5;
      hi += 0.5;
    }
    double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

Axis empty_axis(bool log) { return {INFINITY, -INFINITY, log}; }

double map(const Axis& a, double v, double from, double to) { return from + (v - a.lo) / (a.hi - a.lo) * (to - from); }

class Canvas {
 public:
  Canvas(Axis x, Axis y) : x_(x), y_(y) {}

  double px(double v) const { return map(x_, x_.log ? std::log10(v) : v, kLeft, kRight); }
  double py(double v) const { return map(y_, y_.log ? std::log10(v) : v, kBottom, kTop); }

  void line(double x1, double y1, double x2, double y2, const std::string& color, double width = 1.0) {
    out_ += "<line x1=\"" + fmt("%.2f", x1) + "\" y1=\"" + fmt("%.2f", y1) + "\" x2=\"" + fmt("%.2f", x2) +
            "\" y2=\"" + fmt("%.2f", y2) + "\" stroke=\"" + color + "\" stroke-width=\"" + fmt("%.1f", width) +
            "\"/>\n";
  }
  void dot(double x, double y, const std::string& color) {
    out_ += "<circle cx=\"" + fmt("%.2f", x) + "\" cy=\"" + fmt("%.2f", y) + "\" r=\"3.5\" fill=\"" + color +
            "\"/>\n";
  }
  void text(double x, double y, const std::string& s, const char* anchor = "start", int size = 12) {
    out_ += "<text x=\"" + fmt("%.2f", x) + "\" y=\"" + fmt("%.2f", y) + "\" font-size=\"" + std::to_string(size) +
            "\" text-anchor=\"" + anchor + "\" font-family=\"sans-serif\">" + escape(s) + "</text>\n";
  }

  void frame(const std::string& title, const std::string& xlabel, const std::string& ylabel) {
    out_ += "<rect x=\"" + fmt("%.0f", kLeft) + "\" y=\"" + fmt("%.0f", kTop) + "\" width=\"" +
            fmt("%.0f", kRight - kLeft) + "\" height=\"" + fmt("%.0f", kBottom - kTop) +
            "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      double tx = x_.lo + (x_.hi - x_.lo) * k / 4, ty = y_.lo + (y_.hi - y_.lo) * k / 4;
      double sx = map(x_, tx, kLeft, kRight), sy = map(y_, ty, kBottom, kTop);
      line(sx, kBottom, sx, kBottom + 5, "black");
      text(sx, kBottom + 18, fmt("%.3g", x_.log ? std::pow(10.0, tx) : tx), "middle", 11);
      line(kLeft - 5, sy, kLeft, sy, "black");
      text(kLeft - 8, sy + 4, fmt("%.3g", y_.log ? std::pow(10.0, ty) : ty), "end", 11);
    }
    text((kLeft + kRight) / 2, 28, title, "middle", 14);
    text((kLeft + kRight) / 2, kBottom + 40, xlabel, "middle");
    out_ += "<text x=\"20\" y=\"" + fmt("%.2f", (kTop + kBottom) / 2) +
            "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\" transform=\"rotate(-90 20 " +
            fmt("%.2f", (kTop + kBottom) / 2) + ")\">" + escape(ylabel) + "</text>\n";
  }

  std::string finish() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", kWidth) + "\" height=\"" +
           fmt("%.0f", kHeight) + "\" viewBox=\"0 0 " + fmt("%.0f", kWidth) + " " + fmt("%.0f", kHeight) +
           "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + out_ + "</svg>\n";
  }

 private:
  Axis x_, y_;
  std::string out_;
};

Plot loglog(const ResultTable& t, const PlotSpec& spec) {
  require(spec.series.size() == 1, ErrorKind::InvalidArgument, "a log-log plot takes one series");
  auto xs = t.numbers(spec.x), ys = t.numbers(spec.series[0].y);
  std::vector<double> zs = spec.covariate.empty() ? std::vector<double>(xs.size(), 1.0) : t.numbers(spec.covariate);
  std::vector<std::size_t> use;
  for (std::size_t k = 0; k < xs.size(); ++k)
    if (xs[k] > 0 && ys[k] > 0 && zs[k] > 0) use.push_back(k);

  Plot plot;
  const bool cov = !spec.covariate.empty();
  const std::size_t params = cov ? 3 : 2;
  if (use.size() >= params) {
    Eigen::MatrixXd X(use.size(), params - 1);
    Eigen::VectorXd y(use.size());
    for (std::size_t i = 0; i < use.size(); ++i) {
      X(i, 0) = std::log(xs[use[i]]);
      if (cov) X(i, 1) = std::log(zs[use[i]]);
      y(i) = std::log(ys[use[i]]);
    }
    LinearFit lf = fit_linear(X, y);
    PlotFit f;
    f.intercept = lf.coef(0);
    f.slope = lf.coef(1);
    f.has_covariate = cov;
    if (cov) f.covariate_slope = lf.coef(2);
    f.r2 = lf.r2;
    f.points = use.size();
    plot.fit = f;
  }

  Axis ax = empty_axis(true), ay = empty_axis(true);
  for (std::size_t k : use) {
    ax.include(std::log10(xs[k]));
    ay.include(std::log10(ys[k]));
  }
  if (use.empty()) ax = ay = {0.0, 1.0, true};
  ax.finish();
  ay.finish();
  Canvas c(ax, ay);
  std::string ylabel = spec.series[0].y;
  c.frame(spec.title, spec.x, ylabel);

  // one colour and one fitted segment per covariate level
  std::map<double, std::vector<std::size_t>> levels;
  for (std::size_t k : use) levels[zs[k]].push_back(k);
  int colour = 0;
  for (const auto& [z, rows] : levels) {
    std::string col = kColors[colour % kPalette];
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t k : rows) {
      c.dot(c.px(xs[k]), c.py(ys[k]), col);
      lo = std::min(lo, xs[k]);
      hi = std::max(hi, xs[k]);
    }
    if (plot.fit) {
      const PlotFit& f = *plot.fit;
      auto model = [&](double x) {
        return std::exp(f.intercept + f.slope * std::log(x) + (cov ? f.covariate_slope * std::log(z) : 0.0));
      };
      c.line(c.px(lo), c.py(model(lo)), c.px(hi), c.py(model(hi)), col, 1.5);
    }
    if (cov) {
      double ly = kBottom - 12 - 16 * (static_cast<double>(levels.size()) - 1 - colour);
      c.dot(kRight - 130, ly - 4, col);
      c.text(kRight - 120, ly, spec.covariate + " = " + fmt("%.6g", z));
    }
    ++colour;
  }
  double ty = kTop + 18;
  if (plot.fit) {
    c.text(kLeft + 10, ty, "slope " + spec.x + ": " + annotation_number(plot.fit->slope));
    if (cov) c.text(kLeft + 10, ty += 16, "slope " + spec.covariate + ": " + annotation_number(plot.fit->covariate_slope));
    c.text(kLeft + 10, ty += 16, "r2: " + annotation_number(plot.fit->r2));
  } else {
    c.text(kLeft + 10, ty, "too few positive points for a fit");
  }
  plot.svg = c.finish();
  return plot;
}

Plot trend(const ResultTable& t, const PlotSpec& spec) {
  require(!spec.series.empty(), ErrorKind::InvalidArgument, "a trend plot needs a series");
  auto xs = t.numbers(spec.x);
  struct Point {
    double x, y, err;
  };
  std::vector<std::vector<Point>> series;
  Axis ax = empty_axis(false), ay = empty_axis(false);
  for (const auto& s : spec.series) {
    auto ys = t.numbers(s.y);
    std::vector<Point> pts;
    if (!s.err.empty()) {
      auto es = t.numbers(s.err);
      for (std::size_t k = 0; k < xs.size(); ++k) pts.push_back({xs[k], ys[k], es[k]});
      std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
    } else {
      std::map<double, std::vector<double>> groups;
      for (std::size_t k = 0; k < xs.size(); ++k) groups[xs[k]].push_back(ys[k]);
      for (const auto& [x, v] : groups) {
        double mean = 0.0, var = 0.0;
        for (double y : v) mean += y;
        mean /= v.size();
        for (double y : v) var += (y - mean) * (y - mean);
        double se = v.size() > 1 ? std::sqrt(var / (v.size() - 1) / v.size()) : 0.0;
        pts.push_back({x, mean, se});
      }
    }
    for (const auto& p : pts) {
      ax.include(p.x);
      ay.include(p.y - p.err);
      ay.include(p.y + p.err);
    }
    series.push_back(std::move(pts));
  }
  ax.finish();
  ay.finish();
  Canvas c(ax, ay);
  std::string ylabel;
  for (const auto& s : spec.series) ylabel += (ylabel.empty() ? "" : ", ") + s.y;
  c.frame(spec.title, spec.x, ylabel);
  for (std::size_t s = 0; s < series.size(); ++s) {
    std::string col = kColors[s % kPalette];
    const auto& pts = series[s];
    for (std::size_t k = 0; k < pts.size(); ++k) {
      double x = c.px(pts[k].x), y = c.py(pts[k].y);
      c.dot(x, y, col);
      if (pts[k].err > 0) {
        double y1 = c.py(pts[k].y - pts[k].err), y2 = c.py(pts[k].y + pts[k].err);
        c.line(x, y1, x, y2, col);
        c.line(x - 4, y1, x + 4, y1, col);
        c.line(x - 4, y2, x + 4, y2, col);
      }
      if (k) c.line(c.px(pts[k - 1].x), c.py(pts[k - 1].y), x, y, col, 1.5);
    }
    c.line(kRight - 150, kTop + 14 + 16 * s, kRight - 130, kTop + 14 + 16 * s, col, 2.0);
    c.text(kRight - 125, kTop + 18 + 16 * s, spec.series[s].y);
  }
  return {c.finish(), std::nullopt};
}

}  // namespace

std::string annotation_number(double v) { return fmt("%.10g", v); }

Plot render_plot(const ResultTable& table, const PlotSpec& spec) {
  require(!table.empty(), ErrorKind::EmptyTable, "table '" + table.schema + "' has no rows to plot");
  validate(table);
  return spec.kind == PlotKind::loglog ? loglog(table, spec) : trend(table, spec);
}

Plot emit_plot(const ResultTable& table, const PlotSpec& spec, const std::string& path) {
  Plot p = render_plot(table, spec);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(os), ErrorKind::Unwritable, "cannot open " + path);
  os << p.svg;
  require(static_cast<bool>(os), ErrorKind::Unwritable, "write failed for " + path);
  return p;
}

}  // namespace rlab
