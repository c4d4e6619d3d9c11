#ifndef ANCHORREFINE_CLI_SVG_H_
#define ANCHORREFINE_CLI_SVG_H_

// Minimal standalone SVG charts. Non-finite points are dropped.

#include <string>
#include <vector>

namespace anchorrefine::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool log_y = false;
  // Optional horizontal reference line.
  bool has_reference = false;
  double reference = 0.0;
  std::string reference_label;
};

struct BarChart {
  std::string title;
  std::string y_label;
  std::vector<std::string> labels;
  std::vector<double> values;
};

std::string RenderSvg(const LineChart& chart);
std::string RenderSvg(const BarChart& chart);

}  // namespace anchorrefine::cli

#endif  // ANCHORREFINE_CLI_SVG_H_
