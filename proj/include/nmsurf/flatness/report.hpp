#pragma once

#include <vector>

#include "nmsurf/flatness/cylinder_fit.hpp"

namespace nmsurf {

struct ScaleEntry {
    int level = 0;          // ball radius 2^{-level} around the base point
    double width = 0.0;
    Eigen::VectorXd direction;
    int points = 0;
    bool usable = false;    // enough points and width above the resolution floor
    bool omitted = false;   // undersampled scale, skipped with a warning
};

struct FlatnessReport {
    std::vector<ScaleEntry> scales;
    std::vector<double> normals_drift; // |nu_l - nu_{l+1}| between usable scales
    double alpha_fit = 0.0;            // growth exponent of widths minus one
    bool alpha_is_infinite = false;    // flat to resolution at every usable scale
    int usable_scales = 0;
    double resolution = 0.0;           // point-sampling resolution of the cloud
};

struct FlatnessOptions {
    int min_points_factor = 10;      // require >= factor * n points per ball
    double width_floor_factor = 10.0; // widths below factor * resolution measure the grid
    double base_radius = 1.0;
};

/// Per-dyadic-scale cylinder directions and widths around the base point,
/// with the Hölder exponent fitted from log2 width against the level. Scales
/// whose width sits below the resolution floor measure the grid rather than
/// the surface and are excluded from the fit; when no scale survives, the
/// exponent is reported as the +infinity sentinel.
FlatnessReport dyadic_flatness_report(const std::vector<Eigen::VectorXd>& boundary_pts,
                                      const Eigen::VectorXd& base, int k_max, double alpha,
                                      const FlatnessOptions& opts = {});

} // namespace nmsurf
