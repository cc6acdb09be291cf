#pragma once

#include <string>
#include <vector>

namespace pbsrdd::cli {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct PlotPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

/// Self-contained SVG line plot: linear axes, inline styling, legend.
std::string render_svg(const PlotPanel& panel);
void write_svg(const std::string& path, const PlotPanel& panel);

}  // namespace pbsrdd::cli
