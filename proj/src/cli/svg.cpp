#include "pbsrdd/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "pbsrdd/core/error.hpp"

namespace pbsrdd::cli {

namespace {

constexpr double kWidth = 720, kHeight = 450;
constexpr double kLeft = 80, kRight = 190, kTop = 40, kBottom = 60;
const char* const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v, double step) {
  char buf[32];
  if (std::abs(v) < 1e-12 * step) v = 0.0;
  int digits = std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9)));
  if (step < 1e-4 || std::abs(v) >= 1e6)
    std::snprintf(buf, sizeof buf, "%.2g", v);
  else
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Axis {
  double lo, hi, step;
};

Axis nice_axis(double lo, double hi) {
  if (!(hi > lo)) {
    double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
  }
  double raw = (hi - lo) / 6.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

}  // namespace

std::string render_svg(const PlotPanel& panel) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : panel.series)
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      xmin = std::min(xmin, s.x[k]);
      xmax = std::max(xmax, s.x[k]);
      ymin = std::min(ymin, s.y[k]);
      ymax = std::max(ymax, s.y[k]);
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  Axis ax = nice_axis(xmin, xmax);
  ax.lo = std::max(ax.lo, xmin);  // keep the data flush with the x range
  ax.hi = std::min(ax.hi, xmax > xmin ? xmax : ax.hi);
  Axis ay = nice_axis(ymin, ymax);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - ay.lo) / (ay.hi - ay.lo) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
       "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
       escape(panel.title) + "</text>\n";
  // grid and ticks
  Axis tx = nice_axis(ax.lo, ax.hi);
  for (double v = tx.lo; v <= ax.hi + 1e-9 * tx.step; v += tx.step) {
    if (v < ax.lo - 1e-9 * tx.step) continue;
    s += "<line x1=\"" + num(px(v)) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(px(v)) + "\" y2=\"" + num(kTop + ph) +
         "\" stroke=\"#e5e5e5\"/>\n";
    s += "<text x=\"" + num(px(v)) + "\" y=\"" + num(kTop + ph + 18) + "\" text-anchor=\"middle\">" +
         tick_label(v, tx.step) + "</text>\n";
  }
  for (double v = ay.lo; v <= ay.hi + 1e-9 * ay.step; v += ay.step) {
    s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py(v)) + "\" x2=\"" + num(kLeft + pw) + "\" y2=\"" + num(py(v)) +
         "\" stroke=\"#e5e5e5\"/>\n";
    s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(v) + 4) + "\" text-anchor=\"end\">" +
         tick_label(v, ay.step) + "</text>\n";
  }
  s += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 16) + "\" text-anchor=\"middle\">" +
       escape(panel.x_label) + "</text>\n";
  s += "<text transform=\"translate(18," + num(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       escape(panel.y_label) + "</text>\n";

  for (std::size_t k = 0; k < panel.series.size(); ++k) {
    const auto& ser = panel.series[k];
    const char* colour = kColours[k % std::size(kColours)];
    std::string pts;
    for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
      pts += num(px(ser.x[i])) + "," + num(py(ser.y[i])) + " ";
    }
    s += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.6\"";
    if (ser.dashed) s += " stroke-dasharray=\"6 4\"";
    s += " points=\"" + pts + "\"/>\n";
    double ly = kTop + 12 + 20.0 * static_cast<double>(k);
    double lx = kLeft + pw + 14;
    s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 26) + "\" y2=\"" + num(ly) +
         "\" stroke=\"" + colour + "\" stroke-width=\"2\"" + (ser.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
    s += "<text x=\"" + num(lx + 32) + "\" y=\"" + num(ly + 4) + "\">" + escape(ser.label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

void write_svg(const std::string& path, const PlotPanel& panel) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write '" + path + "'");
  out << render_svg(panel);
}

}  // namespace pbsrdd::cli
