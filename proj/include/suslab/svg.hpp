#pragma once

#include <string>
#include <vector>

#include "suslab/roof.hpp"

namespace suslab {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotAxes {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Standalone SVG document with one polyline per series. Points that cannot
/// be drawn on a log axis (nonpositive) are skipped.
std::string line_chart(const PlotAxes& axes, const std::vector<PlotSeries>& series);

/// Horizontal bars with an optional reference value drawn as a vertical line.
std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values, double reference = -1.0);

/// Stacks several SVG documents vertically into one.
std::string stack_svg(const std::vector<std::string>& documents);

/// r over interval i, sampled densely near both singular ends.
PlotSeries roof_graph(const RoofSpec& spec, std::size_t interval, std::size_t points = 400);

}  // namespace suslab
