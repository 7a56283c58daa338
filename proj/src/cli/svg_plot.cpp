#include "sevsteps/cli/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace sevsteps::cli {

namespace {

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 80, kRight = 180, kTop = 40, kBottom = 60;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

}  // namespace

std::string loglog_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, std::log10(s.x[i]));
      x1 = std::max(x1, std::log10(s.x[i]));
      y0 = std::min(y0, std::log10(s.y[i]));
      y1 = std::max(y1, std::log10(s.y[i]));
    }
  }
  if (!std::isfinite(x0)) x0 = -1, x1 = 0, y0 = -1, y1 = 0;
  x0 = std::floor(x0), x1 = std::ceil(x1), y0 = std::floor(y0), y1 = std::ceil(y1);
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (std::log10(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (y1 - std::log10(y)) / (y1 - y0) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";
  for (double d = x0; d <= x1 + 1e-9; d += 1.0) {
    const double x = kLeft + (d - x0) / (x1 - x0) * pw;
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << kTop << "\" x2=\"" << num(x) << "\" y2=\"" << kTop + ph
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << num(x) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
  }
  for (double d = y0; d <= y1 + 1e-9; d += 1.0) {
    const double y = kTop + (y1 - d) / (y1 - y0) * ph;
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << num(y) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << num(y)
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
  svg << "<text transform=\"translate(20," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& data = series[s];
    const char* color = kPalette[s % std::size(kPalette)];
    std::string points;
    for (std::size_t i = 0; i < std::min(data.x.size(), data.y.size()); ++i) {
      if (!(data.x[i] > 0.0) || !(data.y[i] > 0.0) || !std::isfinite(data.y[i])) continue;
      points += num(px(data.x[i])) + "," + num(py(data.y[i])) + " ";
      if (data.markers) {
        svg << "<circle cx=\"" << num(px(data.x[i])) << "\" cy=\"" << num(py(data.y[i])) << "\" r=\"3\" fill=\""
            << color << "\"/>\n";
      }
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
        << (data.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << points << "\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(s);
    svg << "<line x1=\"" << kLeft + pw + 10 << "\" y1=\"" << num(ly) << "\" x2=\"" << kLeft + pw + 30 << "\" y2=\""
        << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\""
        << (data.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    svg << "<text x=\"" << kLeft + pw + 36 << "\" y=\"" << num(ly + 4) << "\">" << escape(data.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace sevsteps::cli
