#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nmsurf/core/region.hpp"
#include "nmsurf/kernel/model.hpp"

namespace nmsurf {

struct PvOptions {
    double near_radius = 1.0;    // outer radius of the near-field annuli
    double pv_tolerance = 1e-7;  // convergence threshold on successive partials
    int max_annuli = 48;
    int radial_nodes = 12;       // Gauss-Legendre per annulus (n = 2)
    int angular_nodes = 24;      // Gauss-Legendre per angular interval (n = 2)
    double tail_tolerance = 1e-9;
    int max_outward_annuli = 80;
    bool paired = true;          // antipodal pairing; false = generic midpoint grid
    int unpaired_angular = 509;  // odd node count for the unpaired diagnostic mode
    int unpaired_radial = 64;
};

/// Principal-value NMC with its near-field / tail split and the inner-cutoff
/// convergence record. delta_sequence holds (delta_j, partial value) with
/// delta_j the inner radius after annulus j.
struct NMCResult {
    double value = 0.0;
    double near_field = 0.0;
    double tail = 0.0;
    std::vector<std::pair<double, double>> delta_sequence;
    bool converged = false;
    double tail_budget = 0.0;        // certified remainder bound not added to value
    bool tail_certified = true;      // false when the far field had no usable description
    double freezing_budget = 0.0;    // numeric models: omitted small-time correction
};

/// p.v. integral of the signed indicator against the kernel at a boundary
/// point y. Near field on dyadic annuli with antipodal cancellation (exact
/// angular occupation in n = 2, exact jump splitting in n = 1), far field by
/// outward annuli closed with the region's far-field description.
///
/// For numeric kernel models the evaluation freezes the metric at y for the
/// singular part and adds the grid-resolved kernel and volume corrections,
/// following the constant-coefficient reduction.
NMCResult nmc_pv(const RegionSpec& region, const Eigen::VectorXd& y, const KernelModel& model,
                 const PvOptions& opts = {});

} // namespace nmsurf
