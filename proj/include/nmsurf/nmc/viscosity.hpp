#pragma once

#include <vector>

#include "nmsurf/nmc/pv.hpp"

namespace nmsurf {

enum class TangentSide { InteriorBall, ExteriorBall };

struct ViscosityPoint {
    Eigen::VectorXd y;
    TangentSide side = TangentSide::InteriorBall;
    double value = 0.0;
    bool within_bound = false;
};

struct ViscosityReport {
    std::vector<ViscosityPoint> tested_points;
    double bound = 0.0; // C0 * r^{-s}
    bool pass = false;
    bool vacuous = false; // no tangent-ball points were found
};

struct ViscosityOptions {
    int max_points = 24;
    double paraboloid_opening = 4.0; // the a in the sliding paraboloid x^n = -a/2 |x'|^2
    double contact_tolerance = 1e-9;
    PvOptions pv;
};

/// Checks the one-sided NMC inequalities at boundary points of the region
/// inside the ball window that admit interior/exterior tangent balls. The
/// detector slides a paraboloid of fixed opening until first contact; points
/// where the paraboloid touches only at the base point qualify.
/// Interior-ball points must satisfy value <= C0 r^{-s}; exterior-ball points
/// value >= -C0 r^{-s}.
ViscosityReport viscosity_bound_check(const RegionSpec& region, const Eigen::VectorXd& omega_center,
                                      double omega_radius, double C0, double r,
                                      const KernelModel& model, const ViscosityOptions& opts = {});

} // namespace nmsurf
