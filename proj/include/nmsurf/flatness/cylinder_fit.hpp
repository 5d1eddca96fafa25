#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nmsurf/core/cylinder.hpp"

namespace nmsurf {

struct CylinderFit {
    Eigen::VectorXd direction; // unit, lexicographically canonical sign
    double width = 0.0;        // min over (nu, offset) of max |(p-c).nu - m|
    double offset = 0.0;       // optimal slab midpoint
    int points_used = 0;
};

/// Thinnest slab containing the in-ball points: direction minimizes the
/// min-max width over unit directions, offset is the attained midpoint.
/// Initialization by the smallest principal component, then local angular
/// refinement. Ties and sign are resolved lexicographically.
CylinderFit fit_cylinder(const std::vector<Eigen::VectorXd>& boundary_pts,
                         const Eigen::VectorXd& center, double radius);

} // namespace nmsurf
