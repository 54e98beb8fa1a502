#pragma once

// Minimal static SVG charts for the command-line outputs.

#include <string>
#include <vector>

#include "twpa/response.hpp"

namespace twpa {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;  // non-finite points break the line
};

std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series);

/// z is [y x x]; cells are colored on a blue-white-red scale.
std::string svg_heatmap(const std::string& title, const std::string& x_label, const std::string& y_label,
                        const std::vector<double>& x, const std::vector<double>& y, const Matrix& z,
                        const std::string& z_label);

}  // namespace twpa
