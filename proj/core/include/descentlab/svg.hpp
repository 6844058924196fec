#pragma once

#include <string>
#include <vector>

namespace descentlab::svg {

struct SeriesPoint {
  double x = 0.0;
  double mean = 0.0;
  double stderr_band = 0.0;  // half-width of the shaded ±1 stderr band
};

struct Series {
  std::string name;
  std::string color;  // CSS color
  std::vector<SeriesPoint> points;
};

struct ChartOptions {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "loss";
  bool log_y = false;
  double width = 900.0;
  double height = 560.0;
};

// Static line chart: one mean polyline per series plus a translucent
// ±1 stderr band. Throws std::invalid_argument when log_y is requested and
// any band value is nonpositive.
std::string render_chart(const std::vector<Series>& series, const ChartOptions& opts);

void write_chart(const std::string& path, const std::vector<Series>& series,
                 const ChartOptions& opts);

}  // namespace descentlab::svg
