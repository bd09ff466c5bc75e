#pragma once

// Static SVG plots rendered from written data files only.

#include <filesystem>
#include <string>
#include <vector>

namespace superrad::plot {

/// s_z and burst-signal panels of a trajectory CSV.
std::string trajectory_svg(const std::filesystem::path& csv);

/// Log-log scaling plot of an "n,value" CSV with N and N^2 guide lines
/// through the first point.
std::string scaling_svg(const std::filesystem::path& csv);

/// Time x amplitude heatmap of a power-map CSV.
std::string power_map_svg(const std::filesystem::path& csv);

/// Renders a plot for every recognised data file in `dir` (trajectory*.csv,
/// scaling.csv, power_map.csv) as <stem>.svg. Returns the written paths.
std::vector<std::filesystem::path> render_directory(const std::filesystem::path& dir);

}  // namespace superrad::plot
