#pragma once

#include "spafac/report.hpp"

#include <string>

namespace spafac {

/// Bar chart of eigenvalues with their percentage of inertia.
std::string scree_svg(const ResultBundle& bundle);

/// Fit against zero ratio for every grid cell over the shaded zone map.
std::string zone_map_svg(const TuningGrid& grid, const ZoneThresholds& zones = {});

/// Row and column factor scores on two dimensions (0-based), with
/// observations and bootstrap regions when the bundle holds them.
std::string factor_map_svg(const ResultBundle& bundle, Index dim_x, Index dim_y);

}  // namespace spafac
