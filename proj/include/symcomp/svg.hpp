#pragma once

// Minimal standalone SVG line charts.

#include <string>
#include <vector>

namespace symcomp::svg {

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool dashed = false;
  bool markers = false;
};

struct ChartOptions {
  std::string title;
  std::string x_label, y_label;
  bool log_x = false, log_y = false;
  int width = 640, height = 420;
};

/// Well-formed SVG document. Non-finite points (and nonpositive ones on a
/// log axis) are dropped.
std::string line_chart(const std::vector<Series>& series, const ChartOptions& opt);

std::string escape(const std::string& s);

}  // namespace symcomp::svg
