#pragma once

#include <string>
#include <vector>

namespace sevsteps::cli {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = true;
  bool dashed = false;
};

/// Static log-log chart.  Non-positive values are skipped.
std::string loglog_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series);

}  // namespace sevsteps::cli
