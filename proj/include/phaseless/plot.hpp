#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace phaseless {

/// Comma-separated table, header first, numbers at full precision.
void write_csv(std::filesystem::path const& path, std::vector<std::string> const& header,
               std::vector<std::vector<double>> const& rows);

/// Reads a table written by write_csv.
void read_csv(std::filesystem::path const& path, std::vector<std::string>& header,
              std::vector<std::vector<double>>& rows);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotAxes {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x{false};
  bool log_y{false};
};

/// Minimal SVG line plot with markers, axes, tick labels and a legend.
/// Non-positive values are dropped on log axes.
void write_svg_plot(std::filesystem::path const& path, std::vector<PlotSeries> const& series,
                    PlotAxes const& axes);

}  // namespace phaseless
