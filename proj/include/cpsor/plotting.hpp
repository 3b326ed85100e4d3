#pragma once

#include <string>
#include <utility>
#include <vector>

namespace cpsor::plot {

struct Bar {
  std::string group;   // e.g. "s1 1s"
  std::string series;  // e.g. "cpsor"
  double value = 0.0;
};

// Fixed 800x450 canvas; groups and series are drawn in sorted order.
std::string bars_svg(std::vector<Bar> bars, const std::string& title);
std::string bars_csv(std::vector<Bar> bars);

struct Polyline {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

// `history` and `truth` first, then the predictions sorted by name.
std::vector<Polyline> trajectory_series(Polyline history, Polyline truth, std::vector<Polyline> predictions);
// Equal-aspect projection of every point onto a fixed 800x450 canvas.
std::string trajectory_svg(const std::vector<Polyline>& series, const std::string& title);
std::string trajectory_csv(const std::vector<Polyline>& series);

}  // namespace cpsor::plot
