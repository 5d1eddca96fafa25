#pragma once

#include <vector>

#include "nmsurf/core/region.hpp"
#include "nmsurf/kernel/model.hpp"

namespace nmsurf {

struct PerimeterResult {
    double value = 0.0;               // Richardson-extrapolated
    std::vector<double> refinements;  // raw values per refinement level
    double tail = 0.0;                // analytic far contribution at the finest level
    bool converged = false;
};

struct PerimeterOptions {
    int levels = 3;
    int base_cells = 64;      // cells across the window at the coarsest level
    double extent_factor = 8.0; // numeric window half-extent / omega radius
};

/// Relative fractional perimeter of the region in the ball window: the
/// kernel pair energy over (Omega x Omega) u (Omega x COmega), with the far
/// field closed analytically where the region is eventually constant.
/// Refinement doubles the cell count per level; a non-Cauchy refinement
/// sequence is an error carrying the trace.
PerimeterResult fractional_perimeter(const RegionSpec& region, const Eigen::VectorXd& omega_center,
                                     double omega_radius, const KernelModel& model,
                                     const PerimeterOptions& opts = {});

} // namespace nmsurf
