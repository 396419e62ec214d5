#pragma once

#include <string>
#include <vector>

namespace eeg {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "time (s)";
  std::string y_label = "F(x_k) - F*";
  bool log_y = true;
  double y_floor = 1e-16;  // clamp for log scale
  int width = 800;
  int height = 500;
};

/// Static SVG line chart. Points with non-finite coordinates are skipped.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options);
void write_svg(const std::string& path, const std::vector<PlotSeries>& series,
               const PlotOptions& options);

}  // namespace eeg
