#pragma once

// Run artifacts written by the CLI. The merged front goes to CSV and every
// iterate to JSON lines, next to a summary and SVG plots of objective pairs.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cmgd/driver.hpp"
#include "cmgd/pareto.hpp"

namespace cmgd {

/// Final points of the trajectories, filtered; origins are "start <i>".
ParetoFront front_from_trajectories(const std::vector<Trajectory>& runs);

/// Header x0..x{d-1}, f0..f{n-1}, origin; numbers with 17 significant digits.
void write_front_csv(std::ostream& out, const ParetoFront& front);

/// Inverse of write_front_csv. Throws std::runtime_error on malformed input.
ParetoFront read_front_csv(std::istream& in);

/// One JSON object per iterate: start, iteration, stage, point, objectives,
/// eta, h, feasibility.
void write_trajectories_jsonl(std::ostream& out, const std::vector<Trajectory>& runs);

/// Termination tallies, certificate values per start, wall-clock seconds and
/// front size, as indented JSON text.
std::string summary_json(const std::vector<Trajectory>& runs, double wall_seconds, std::size_t front_size,
                         const std::string& problem_label);

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  /// Optional reference curve drawn as a polyline under the markers.
  std::vector<std::pair<double, double>> overlay;
};

inline constexpr double kPlotWidth = 640.0;
inline constexpr double kPlotHeight = 480.0;

/// Scatter plot of objectives (i, j) of every entry. Throws
/// ContractViolation on an empty front or an objective index out of range.
std::string emit_plot(const ParetoFront& front, std::size_t i, std::size_t j, const PlotOptions& opts = {});

}  // namespace cmgd
