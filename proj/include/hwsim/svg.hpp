#pragma once

#include <string>
#include <vector>

namespace hwsim {

// Minimal line-chart writer; enough for convergence and fairness plots
// without pulling in a plotting stack.
struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
  bool log_x = false;
};

void write_svg_chart(const std::string& path, const SvgChart& chart);

}  // namespace hwsim
